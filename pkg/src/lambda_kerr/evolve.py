"""Exact time evolution by blocks.

The initial state is split into (nL, nR) block vectors plus a residual of
labels that belong to no block (|1, 0, nR> and |3, nL, 0>). Each block
vector is propagated with its own 3x3 unitary; residual labels only pick up
their diagonal phase. Eigensystems are time independent, so a sweep
diagonalizes once and then only recomputes phases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from . import observables as obs
from .dressed import SubspaceEigensystem, block_coefficients, eigensystem
from .fock import JointState, Label
from .model import ModelError, ModelParams, diagonal_energy, validate

# time points evaluated together in a sweep; bounds peak memory
CHUNK = 64


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """Block slots of a joint state.

    ``vectors[nL, nR]`` holds the amplitudes of (|1, nL+1, nR>, |2, nL, nR>,
    |3, nL, nR+1>). ``state`` is the (possibly padded) source state whose
    cutoffs fix the block grid.
    """

    vectors: np.ndarray
    residual: Dict[Label, complex]
    state: JointState

    @property
    def grid_shape(self):
        return self.vectors.shape[:2]

    def occupied(self):
        """Blocks with a non-zero vector, in canonical (nL, nR) order."""
        nz = np.any(self.vectors != 0, axis=-1)
        return [((int(i), int(j)), self.vectors[i, j]) for i, j in zip(*np.nonzero(nz))]

    def residual_mass(self) -> float:
        return float(sum(abs(v) ** 2 for v in self.residual.values()))


def _fit_blocks(state: JointState) -> JointState:
    """Pad the cutoffs until every non-residual amplitude sits in a full block."""
    psi = state.psi
    NL, NR = state.nmax_L, state.nmax_R
    grow_L = np.any(psi[1, NL, :] != 0) or np.any(psi[2, NL, 1:] != 0)
    grow_R = np.any(psi[1, :, NR] != 0) or np.any(psi[0, 1:, NR] != 0)
    if grow_L or grow_R:
        return state.padded(NL + int(grow_L), NR + int(grow_R))
    return state


def decompose(initial: JointState) -> BlockDecomposition:
    state = _fit_blocks(initial)
    psi = state.psi
    NL, NR = state.nmax_L, state.nmax_R
    vectors = np.stack(
        [psi[0, 1:, :NR], psi[1, :NL, :NR], psi[2, :NL, 1:]],
        axis=-1,
    )
    residual = {}
    for n in range(NR + 1):
        if psi[0, 0, n] != 0:
            residual[(1, 0, n)] = complex(psi[0, 0, n])
    for m in range(NL + 1):
        if psi[2, m, 0] != 0:
            residual[(3, m, 0)] = complex(psi[2, m, 0])
    return BlockDecomposition(vectors=vectors, residual=residual, state=state)


def _frame_phase_rates(state: JointState, params: ModelParams) -> np.ndarray:
    """Per-label frequency of the constant-of-motion phase factor."""
    if params.absolute_freqs is None:
        raise ModelError("full-phase frame requires absolute_freqs (omega_L, omega_R, omega_2)")
    w_L, w_R, w_2 = params.absolute_freqs
    m = np.arange(state.nmax_L + 1)[None, :, None]
    n = np.arange(state.nmax_R + 1)[None, None, :]
    level = np.arange(1, 4)[:, None, None]
    N1 = m - (level == 1) + 1
    N2 = n - (level == 3) + 1
    return w_L * N1 + w_R * N2 + w_2 - w_L - w_R


class Evolver:
    """Diagonalized form of one initial state under one parameter set."""

    def __init__(self, initial: JointState, params: ModelParams, eigensystem_fn=eigensystem):
        self.params = validate(params)
        self.initial = initial
        self.decomposition = dec = decompose(initial)
        self.state = dec.state
        NL, NR = dec.grid_shape
        nL, nR = np.meshgrid(np.arange(NL), np.arange(NR), indexing="ij")
        self.block = block_coefficients(nL, nR, self.params)
        self.eig: SubspaceEigensystem = eigensystem_fn(self.block)
        V = self.eig.vectors
        # components of each block vector in its dressed basis
        self.coeffs = np.einsum("...ki,...k->...i", V.conj(), dec.vectors)

        labels = list(dec.residual)
        self.res_index = tuple(np.array(ix) for ix in zip(*[(lv - 1, m, n) for lv, m, n in labels])) if labels else None
        self.res_amp = np.array([dec.residual[k] for k in labels], dtype=complex)
        self.res_energy = np.array([diagonal_energy(lv, m, n, self.params) for lv, m, n in labels], dtype=float)
        self.residual_mass = dec.residual_mass()

        self.frame_rates = None
        if initial.frame == "full-phase":
            self.frame_rates = _frame_phase_rates(self.state, self.params)

    def psi_at(self, times: Sequence[float]) -> np.ndarray:
        """Amplitude arrays for each time, shape (len(times), 3, nL+1, nR+1)."""
        ts = np.asarray(times, dtype=float)
        NL, NR = self.decomposition.grid_shape
        V = self.eig.vectors
        phases = np.exp(-1j * self.eig.energies[None] * ts[:, None, None, None])
        vec = np.einsum("...ik,t...k->t...i", V, self.coeffs[None] * phases)

        psi = np.zeros((len(ts),) + self.state.psi.shape, dtype=complex)
        psi[:, 0, 1:, :NR] = vec[..., 0]
        psi[:, 1, :NL, :NR] = vec[..., 1]
        psi[:, 2, :NL, 1:] = vec[..., 2]
        if self.res_index is not None:
            res = self.res_amp[None] * np.exp(-1j * self.res_energy[None] * ts[:, None])
            psi[(slice(None),) + self.res_index] = res
        if self.frame_rates is not None:
            psi *= np.exp(-1j * self.frame_rates[None] * ts[:, None, None, None])
        # t = 0 returns the initial amplitudes exactly
        psi[ts == 0] = self.state.psi
        return psi

    def state_at(self, t: float) -> JointState:
        if t == 0:
            return self.state
        return self.state.replace(psi=self.psi_at([t])[0])


def evolve_state(initial: JointState, params: ModelParams, t: float) -> JointState:
    """Exact state at time t (in units of 1/lambda)."""
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    if initial.frame == "full-phase" and params.absolute_freqs is None:
        raise ModelError("full-phase frame requires absolute_freqs (omega_L, omega_R, omega_2)")
    if t == 0:
        return initial
    return Evolver(initial, params).state_at(t)


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    """Column-oriented sweep result; one entry per grid point."""

    columns: Dict[str, np.ndarray]

    def __len__(self):
        return len(self.columns["t"])

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def rows(self):
        return [
            obs.ObservableRow(**{k: float(self.columns[k][i]) for k in obs.COLUMNS})
            for i in range(len(self))
        ]


OBSERVER_COLUMNS = {
    "entropy": ("entropy",),
    "populations": ("rho11", "rho22", "rho33"),
    "duan": ("duan_total",),
    "squeezing": ("sq_plus", "sq_minus"),
    "moments": ("mean_nL", "mean_nR"),
}


def time_sweep(
    initial: JointState,
    params: ModelParams,
    grid: Iterable[float],
    observers: Optional[Sequence[str]] = None,
    evolver: Optional[Evolver] = None,
) -> ObservableSeries:
    """Observables on every grid point.

    ``observers`` selects column groups (see ``OBSERVER_COLUMNS``); columns
    of unselected groups are NaN. ``t``, ``norm`` and ``residual_mass`` are
    always filled.
    """
    ts = np.asarray(list(grid), dtype=float)
    if ts.ndim != 1 or len(ts) == 0:
        raise ValueError("time grid must be a non-empty list")
    if not np.all(np.isfinite(ts)):
        raise ValueError("time grid must be finite")
    if np.any(np.diff(ts) <= 0):
        raise ValueError("time grid must be strictly increasing")
    if observers is not None:
        unknown = set(observers) - set(OBSERVER_COLUMNS)
        if unknown:
            raise ValueError(f"unknown observers {sorted(unknown)}")
    if initial.frame == "full-phase" and params.absolute_freqs is None:
        raise ModelError("full-phase frame requires absolute_freqs (omega_L, omega_R, omega_2)")

    ev = evolver or Evolver(initial, params)
    parts = []
    for start in range(0, len(ts), CHUNK):
        chunk = ts[start:start + CHUNK]
        parts.append(obs.observe(ev.psi_at(chunk), ev.residual_mass, chunk))
    columns = {k: np.concatenate([p[k] for p in parts]) for k in obs.COLUMNS}
    if observers is not None:
        keep = {"t", "norm", "residual_mass"}
        for group in observers:
            keep.update(OBSERVER_COLUMNS[group])
        for k in obs.COLUMNS:
            if k not in keep:
                columns[k] = np.full(len(ts), np.nan)
    return ObservableSeries(columns)

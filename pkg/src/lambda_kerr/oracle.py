"""Brute-force reference evolution in the full truncated product basis.

Nothing here touches the block machinery: the Hamiltonian is assembled
label by label, diagonalized densely, and evolved spectrally.

Two variants differ only in the classical-drive term:

* ``"block"`` couples |1, m+1, n> <-> |3, m, n+1>, matching the 3x3 blocks
  the analytic solution is built from;
* ``"literal"`` couples |1, m, n> <-> |3, m, n>, as the operator
  Omega |1><3| written in the Hamiltonian would. This term does not commute
  with the excitation numbers, so the two variants disagree once Omega != 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Tuple

import numpy as np

from .fock import JointState, Label
from .model import ModelParams, coupling_f, diagonal_energy, validate

MAX_DIM = 4096
VARIANTS = ("block", "literal")


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DenseHamiltonian:
    matrix: np.ndarray
    labels: List[Label]
    nmax_L: int
    nmax_R: int
    variant: str
    index: Dict[Label, int] = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> Tuple[np.ndarray, np.ndarray]:
        """(energies, eigenvector columns), computed once."""
        return np.linalg.eigh(self.matrix)

    def vector(self, state: JointState) -> np.ndarray:
        if (state.nmax_L, state.nmax_R) != (self.nmax_L, self.nmax_R):
            raise ValueError(
                f"state cutoffs ({state.nmax_L}, {state.nmax_R}) do not match "
                f"Hamiltonian ({self.nmax_L}, {self.nmax_R})"
            )
        # canonical label order is exactly the C-order flattening of psi
        return state.psi.reshape(-1)

    def excitation_number_L(self) -> np.ndarray:
        """Diagonal matrix of N1 = n_L - |1><1| + 1."""
        return np.diag([m - (lv == 1) + 1.0 for lv, m, _ in self.labels])


def _assemble(params: ModelParams, nmax_L: int, nmax_R: int, variant: str) -> DenseHamiltonian:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    params = validate(params)
    dim = 3 * (nmax_L + 1) * (nmax_R + 1)
    if dim > MAX_DIM:
        raise OracleSizeError(f"dense dimension {dim} exceeds {MAX_DIM}")
    labels = list(itertools.product((1, 2, 3), range(nmax_L + 1), range(nmax_R + 1)))
    index = {lab: k for k, lab in enumerate(labels)}
    H = np.zeros((dim, dim), dtype=complex)

    def couple(upper, lower, value):
        # <upper|H|lower> = value, plus Hermitian conjugate
        i, j = index[upper], index[lower]
        H[i, j] += value
        H[j, i] += np.conj(value)

    for lab in labels:
        H[index[lab], index[lab]] = diagonal_energy(*lab, params)

    omega = complex(params.omega_rabi)
    for m in range(nmax_L + 1):
        for n in range(nmax_R + 1):
            # lambda_L a_L f(n_L) |2><1| on |1, m, n>
            if m >= 1:
                couple((2, m - 1, n), (1, m, n), params.lambda_L * coupling_f(m, params.beta) * np.sqrt(m))
            # lambda_R a_R f(n_R) |2><3| on |3, m, n>
            if n >= 1:
                couple((2, m, n - 1), (3, m, n), params.lambda_R * coupling_f(n, params.beta) * np.sqrt(n))
            if omega != 0:
                if variant == "literal":
                    couple((1, m, n), (3, m, n), omega)
                elif m + 1 <= nmax_L and n + 1 <= nmax_R:
                    couple((1, m + 1, n), (3, m, n + 1), omega)
    return DenseHamiltonian(H, labels, nmax_L, nmax_R, variant, index)


def build_block_hamiltonian(params: ModelParams, nmax_L: int, nmax_R: int) -> DenseHamiltonian:
    return _assemble(params, nmax_L, nmax_R, "block")


def build_literal_hamiltonian(params: ModelParams, nmax_L: int, nmax_R: int) -> DenseHamiltonian:
    return _assemble(params, nmax_L, nmax_R, "literal")


def evolve_oracle(H: DenseHamiltonian, psi0: JointState, t: float) -> JointState:
    """psi(t) = sum_k exp(-i E_k t) |k><k|psi0>."""
    E, W = H.spectrum
    v0 = H.vector(psi0)
    vt = W @ (np.exp(-1j * E * t) * (W.conj().T @ v0))
    return psi0.replace(psi=vt.reshape(psi0.psi.shape))


def compare(
    analytic: Callable[[float], JointState],
    oracle: Callable[[float], JointState],
    grid: Iterable[float],
) -> float:
    """Largest amplitude difference between two evolution paths over a grid."""
    worst = 0.0
    for t in grid:
        a, b = analytic(t), oracle(t)
        NL = max(a.nmax_L, b.nmax_L)
        NR = max(a.nmax_R, b.nmax_R)
        diff = a.padded(NL, NR).psi - b.padded(NL, NR).psi
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def oracle_check(initial: JointState, params: ModelParams, grid: Iterable[float], variant: str = "block") -> float:
    """Max deviation of the block solution from the dense oracle on ``grid``."""
    from .evolve import Evolver

    if initial.frame != "interaction":
        raise ValueError("the oracle works in the interaction frame only")
    ev = Evolver(initial, params)
    state0 = ev.state
    H = _assemble(params, state0.nmax_L, state0.nmax_R, variant)
    return compare(ev.state_at, lambda t: evolve_oracle(H, state0, t), grid)

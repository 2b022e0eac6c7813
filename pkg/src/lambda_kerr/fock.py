"""Field states, the joint atom-field state and ladder-operator algebra.

A joint state is stored as a dense complex array ``psi[i, nL, nR]`` with
``i = 0, 1, 2`` for atomic levels |1>, |2>, |3>. Labels handed to or
returned from the public API use 1-based atomic levels, ``(level, nL, nR)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.special import gammaln

from .model import AtomInit

Label = Tuple[int, int, int]

DEFAULT_TAIL_EPS = 1e-12
DEFAULT_CEILING = 500
FIELD_DENSITY_CAP = 4096


class TruncationError(ValueError):
    """The requested tail tolerance needs more Fock levels than allowed."""


@dataclass(frozen=True)
class FieldSpec:
    """Initial state of one cavity mode.

    Use the ``coherent``, ``binomial`` and ``explicit`` constructors rather
    than filling the fields by hand.
    """

    kind: str
    alpha: complex = 0.0
    eta: float = 0.0
    M: int = 0
    amplitudes: Tuple[complex, ...] = ()
    tail_eps: float = DEFAULT_TAIL_EPS
    ceiling: int = DEFAULT_CEILING

    def __post_init__(self):
        if self.kind not in ("coherent", "binomial", "explicit"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if not 0 < self.tail_eps < 1:
            raise ValueError(f"tail_eps must lie in (0, 1), got {self.tail_eps!r}")
        if self.kind == "binomial":
            if not 0.0 <= self.eta <= 1.0:
                raise ValueError(f"binomial eta must lie in [0, 1], got {self.eta!r}")
            if int(self.M) != self.M or self.M < 0:
                raise ValueError(f"binomial M must be a non-negative integer, got {self.M!r}")
        if self.kind == "explicit":
            if len(self.amplitudes) == 0:
                raise ValueError("explicit field needs at least one amplitude")
            norm = sum(abs(g) ** 2 for g in self.amplitudes)
            if abs(norm - 1.0) > 1e-12:
                raise ValueError(f"explicit amplitudes must be normalized, got norm {norm!r}")

    @classmethod
    def coherent(cls, alpha, **kw) -> "FieldSpec":
        return cls("coherent", alpha=complex(alpha), **kw)

    @classmethod
    def binomial(cls, eta, M, **kw) -> "FieldSpec":
        return cls("binomial", eta=float(eta), M=int(M), **kw)

    @classmethod
    def explicit(cls, amplitudes: Iterable[complex], **kw) -> "FieldSpec":
        return cls("explicit", amplitudes=tuple(complex(g) for g in amplitudes), **kw)

    @classmethod
    def fock(cls, n: int, **kw) -> "FieldSpec":
        amps = [0.0] * (n + 1)
        amps[n] = 1.0
        return cls.explicit(amps, **kw)

    @classmethod
    def vacuum(cls, **kw) -> "FieldSpec":
        return cls.fock(0, **kw)


def coherent_amplitudes(alpha, nmax: int) -> np.ndarray:
    """Fock amplitudes g_0..g_nmax of the coherent state |alpha>."""
    if nmax < 0:
        raise ValueError("nmax must be non-negative")
    alpha = complex(alpha)
    g = np.empty(nmax + 1, dtype=complex)
    g[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, nmax + 1):
        g[n] = g[n - 1] * alpha / math.sqrt(n)
    return g


def binomial_amplitudes(eta: float, M: int) -> np.ndarray:
    """Fock amplitudes of the binomial state |eta, M>, n = 0..M."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta!r}")
    if M < 0:
        raise ValueError("M must be non-negative")
    n = np.arange(M + 1)
    if eta == 0.0:
        probs = (n == 0).astype(float)
    elif eta == 1.0:
        probs = (n == M).astype(float)
    else:
        log_p = (
            gammaln(M + 1) - gammaln(n + 1) - gammaln(M - n + 1)
            + n * math.log(eta) + (M - n) * math.log1p(-eta)
        )
        probs = np.exp(log_p)
    return np.sqrt(probs).astype(complex)


def choose_truncation(spec: FieldSpec) -> int:
    """Smallest cutoff whose discarded tail probability is below ``spec.tail_eps``."""
    if spec.kind == "binomial":
        nmax = spec.M
    elif spec.kind == "explicit":
        nmax = len(spec.amplitudes) - 1
    else:
        mean = abs(spec.alpha) ** 2
        nmax = 0
        if mean > 0:
            # poisson.sf(k) = P(n > k), evaluated without cancellation
            nmax = int(math.floor(mean))
            while stats.poisson.sf(nmax, mean) >= spec.tail_eps:
                nmax += 1
                if nmax > spec.ceiling:
                    break
    if nmax > spec.ceiling:
        raise TruncationError(
            f"{spec.kind} field needs nmax >= {nmax} (ceiling {spec.ceiling}); "
            "raise the ceiling or loosen tail_eps"
        )
    return nmax


def field_amplitudes(spec: FieldSpec) -> np.ndarray:
    """Truncated amplitude list g_0..g_nmax for ``spec``."""
    nmax = choose_truncation(spec)
    if spec.kind == "coherent":
        return coherent_amplitudes(spec.alpha, nmax)
    if spec.kind == "binomial":
        return binomial_amplitudes(spec.eta, spec.M)
    return np.asarray(spec.amplitudes, dtype=complex)


@dataclass(frozen=True, eq=False)
class JointState:
    """Pure state of atom plus two cavity modes.

    ``psi`` has shape ``(3, nmax_L + 1, nmax_R + 1)`` and is read-only.
    ``leakage`` accumulates probability pushed past the cutoff by creation
    operators; ``tail_eps`` is the truncation tolerance the state was built
    with.
    """

    psi: np.ndarray
    frame: str = "interaction"
    tail_eps: float = DEFAULT_TAIL_EPS
    leakage: float = 0.0

    def __post_init__(self):
        psi = np.array(self.psi, dtype=complex)
        if psi.ndim != 3 or psi.shape[0] != 3:
            raise ValueError(f"psi must have shape (3, nL, nR), got {psi.shape}")
        if self.frame not in ("interaction", "full-phase"):
            raise ValueError(f"unknown frame {self.frame!r}")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    @property
    def nmax_L(self) -> int:
        return self.psi.shape[1] - 1

    @property
    def nmax_R(self) -> int:
        return self.psi.shape[2] - 1

    @property
    def entries(self) -> Dict[Label, complex]:
        """Non-zero amplitudes keyed by label, in canonical (level, nL, nR) order."""
        return dict(self.items())

    def items(self) -> Iterator[Tuple[Label, complex]]:
        for i, m, n in zip(*np.nonzero(self.psi)):
            yield (int(i) + 1, int(m), int(n)), complex(self.psi[i, m, n])

    def __getitem__(self, label: Label) -> complex:
        level, m, n = label
        if not (1 <= level <= 3):
            raise KeyError(label)
        if m > self.nmax_L or n > self.nmax_R or m < 0 or n < 0:
            return 0j
        return complex(self.psi[level - 1, m, n])

    def norm(self) -> float:
        """Squared norm <psi|psi>."""
        return float(np.sum(np.abs(self.psi) ** 2))

    def padded(self, nmax_L: int, nmax_R: int) -> "JointState":
        """Same state embedded in larger cutoffs."""
        if nmax_L < self.nmax_L or nmax_R < self.nmax_R:
            raise ValueError("padding cannot shrink the cutoffs")
        psi = np.zeros((3, nmax_L + 1, nmax_R + 1), dtype=complex)
        psi[:, : self.nmax_L + 1, : self.nmax_R + 1] = self.psi
        return self.replace(psi=psi)

    def replace(self, **changes) -> "JointState":
        kw = dict(psi=self.psi, frame=self.frame, tail_eps=self.tail_eps, leakage=self.leakage)
        kw.update(changes)
        return JointState(**kw)

    @classmethod
    def from_entries(
        cls,
        entries: Dict[Label, complex],
        nmax_L: int = None,
        nmax_R: int = None,
        **kw,
    ) -> "JointState":
        """Build a state from a label -> amplitude mapping."""
        if nmax_L is None:
            nmax_L = max((m for _, m, _ in entries), default=0)
        if nmax_R is None:
            nmax_R = max((n for _, _, n in entries), default=0)
        psi = np.zeros((3, nmax_L + 1, nmax_R + 1), dtype=complex)
        for (level, m, n), amp in entries.items():
            if not 1 <= level <= 3:
                raise ValueError(f"atomic level must be 1..3, got {level}")
            if m > nmax_L or n > nmax_R:
                raise ValueError(f"label {(level, m, n)} exceeds cutoffs ({nmax_L}, {nmax_R})")
            psi[level - 1, m, n] = amp
        return cls(psi, **kw)


def make_initial_state(
    atom: AtomInit,
    left: FieldSpec,
    right: FieldSpec,
    frame: str = "interaction",
) -> JointState:
    """Product state atom x left field x right field.

    The cutoffs are one above the field truncation in each mode, so every
    block the initial state touches fits inside the array and the evolved
    state never needs to grow.
    """
    g_L = field_amplitudes(left)
    g_R = field_amplitudes(right)
    psi = np.zeros((3, len(g_L) + 1, len(g_R) + 1), dtype=complex)
    psi[:, :-1, :-1] = atom.as_array()[:, None, None] * np.multiply.outer(g_L, g_R)[None]
    return JointState(psi, frame=frame, tail_eps=max(left.tail_eps, right.tail_eps))


# -- ladder operators --------------------------------------------------------

_MODE_AXIS = {"L": 1, "R": 2}


def _parse_op(token) -> Tuple[str, str]:
    """Accept ("L", "annihilate") tuples or compact tokens "a_L", "adag_R", "n_L"."""
    if isinstance(token, tuple):
        mode, op = token
    else:
        kind, _, mode = token.partition("_")
        op = {"a": "annihilate", "adag": "create", "n": "number"}.get(kind)
    if mode not in _MODE_AXIS or op not in ("annihilate", "create", "number"):
        raise ValueError(f"unrecognized ladder operator {token!r}")
    return mode, op


def apply_ladder(state: JointState, mode: str, op: str) -> JointState:
    """Apply a_j, a_j^dagger or n_j (j = "L" or "R") to ``state``.

    The result is generally unnormalized. Creation on the top Fock level
    drops that amplitude and adds its weight to ``leakage``.
    """
    if mode not in _MODE_AXIS:
        raise ValueError(f"mode must be 'L' or 'R', got {mode!r}")
    axis = _MODE_AXIS[mode]
    psi = state.psi
    size = psi.shape[axis]
    shape = [1, 1, 1]
    shape[axis] = size
    n = np.arange(size, dtype=float).reshape(shape)
    out = np.zeros_like(psi)
    leak = state.leakage
    src = [slice(None)] * 3
    dst = [slice(None)] * 3
    if op == "number":
        out = psi * n
    elif op == "annihilate":
        # a|n> = sqrt(n)|n-1>
        src[axis], dst[axis] = slice(1, None), slice(None, -1)
        out[tuple(dst)] = (psi * np.sqrt(n))[tuple(src)]
    elif op == "create":
        # a+|n> = sqrt(n+1)|n+1>
        src[axis], dst[axis] = slice(None, -1), slice(1, None)
        scaled = psi * np.sqrt(n + 1)
        out[tuple(dst)] = scaled[tuple(src)]
        top = [slice(None)] * 3
        top[axis] = -1
        leak += float(np.sum(np.abs(scaled[tuple(top)]) ** 2))
    else:
        raise ValueError(f"unknown ladder op {op!r}")
    return state.replace(psi=out, leakage=leak)


def expectation(state: JointState, word: Sequence) -> complex:
    """<psi| w_1 w_2 ... w_k |psi>, operators applied right to left."""
    if len(word) > 4:
        raise ValueError("operator words are limited to length 4")
    ket = state
    for token in reversed(list(word)):
        ket = apply_ladder(ket, *_parse_op(token))
    return complex(np.vdot(state.psi, ket.psi))


# -- partial traces -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AtomDensityMatrix:
    """Reduced 3x3 density matrix of the atom."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (3, 3):
            raise ValueError("atomic density matrix must be 3x3")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise ValueError("atomic density matrix is not Hermitian")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.rho)

    @property
    def populations(self) -> np.ndarray:
        return self.rho.diagonal().real.copy()


def atom_rho(psi: np.ndarray) -> np.ndarray:
    """rho_ij = sum_{nL,nR} psi_i psi_j^*, batched over leading axes."""
    rho = np.einsum("...iab,...jab->...ij", psi, psi.conj())
    # exact Hermiticity regardless of summation order
    return 0.5 * (rho + np.swapaxes(rho, -1, -2).conj())


def partial_trace_atom(state: JointState) -> AtomDensityMatrix:
    """Trace out both cavity modes."""
    return AtomDensityMatrix(atom_rho(state.psi))


def partial_trace_field(state: JointState) -> np.ndarray:
    """Two-mode field density matrix over |nL, nR>, flattened row-major.

    Dense, so limited to small cutoffs.
    """
    dim = (state.nmax_L + 1) * (state.nmax_R + 1)
    if dim > FIELD_DENSITY_CAP:
        raise ValueError(f"field dimension {dim} exceeds cap {FIELD_DENSITY_CAP}")
    flat = state.psi.reshape(3, dim)
    return flat.T @ flat.conj()

"""Atom-photon entanglement, DGCZ total variance and two-mode squeezing.

Array-level functions take ``psi`` with shape ``(..., 3, nL+1, nR+1)`` so a
whole block of time points is reduced in one call; the JointState wrappers
are thin shims over them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .fock import AtomDensityMatrix, JointState, atom_rho, partial_trace_atom

LN3 = math.log(3.0)
EIG_FLOOR = 1e-14
NEG_TOL = 1e-10
LEAKAGE_TOL = 1e-9
IMAG_TOL = 1e-8


class InvalidDensityError(ValueError):
    pass


class NumericalInconsistency(ArithmeticError):
    pass


@dataclass(frozen=True)
class ObservableRow:
    t: float
    entropy: float
    rho11: float
    rho22: float
    rho33: float
    duan_total: float
    sq_plus: float
    sq_minus: float
    mean_nL: float
    mean_nR: float
    norm: float
    residual_mass: float


COLUMNS = tuple(f.name for f in fields(ObservableRow))


@dataclass(frozen=True)
class MomentRecord:
    """First and second moments of the two cavity modes."""

    a_L: complex
    a_R: complex
    adag_L: complex
    adag_R: complex
    n_L: float
    n_R: float
    a_L2: complex
    a_R2: complex
    adag_L2: complex
    adag_R2: complex
    a_R_a_L: complex
    adag_R_adag_L: complex
    adag_R_a_L: complex
    a_R_adag_L: complex


# -- entropy ----------------------------------------------------------------------


def entropy_from_eigenvalues(eps: np.ndarray) -> np.ndarray:
    """-sum eps ln eps over the last axis (nats)."""
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < -NEG_TOL):
        raise InvalidDensityError(f"density matrix has eigenvalue {eps.min():.3e}")
    eps = np.where(eps > EIG_FLOOR, eps, 0.0)
    logs = np.log(np.where(eps > 0, eps, 1.0))
    # an eigenvalue a rounding error above 1 would give -1e-16
    return np.maximum(-np.sum(eps * logs, axis=-1), 0.0)


def atom_entropy(rho) -> float:
    """Von Neumann entropy of a 3x3 atomic density matrix."""
    if isinstance(rho, AtomDensityMatrix):
        rho = rho.rho
    return float(entropy_from_eigenvalues(np.linalg.eigvalsh(rho)))


def dem(state: JointState) -> float:
    """Atom-field entanglement: entropy of the reduced atomic state."""
    return atom_entropy(partial_trace_atom(state))


def field_entropy(state: JointState) -> float:
    """Entropy of the reduced two-mode field state (small cutoffs only)."""
    from .fock import partial_trace_field

    return float(entropy_from_eigenvalues(np.linalg.eigvalsh(partial_trace_field(state))))


# -- moments ----------------------------------------------------------------------


def _moment_arrays(psi: np.ndarray) -> dict:
    """Normal-ordered moments, batched over the leading axes of psi."""
    NL, NR = psi.shape[-2], psi.shape[-1]
    m = np.arange(NL, dtype=float)[:, None]
    n = np.arange(NR, dtype=float)[None, :]
    prob = np.abs(psi) ** 2
    axes = (-3, -2, -1)

    def overlap(bra, ket, weight):
        return np.sum(bra.conj() * weight * ket, axis=axes)

    out = {
        "norm": np.sum(prob, axis=axes),
        "n_L": np.sum(prob * m, axis=axes),
        "n_R": np.sum(prob * n, axis=axes),
    }
    # <a_L> = sum conj(psi[m-1, n]) sqrt(m) psi[m, n]
    out["a_L"] = overlap(psi[..., :-1, :], psi[..., 1:, :], np.sqrt(m[1:]))
    out["a_R"] = overlap(psi[..., :, :-1], psi[..., :, 1:], np.sqrt(n[:, 1:]))
    out["a_L2"] = overlap(psi[..., :-2, :], psi[..., 2:, :], np.sqrt(m[2:] * (m[2:] - 1)))
    out["a_R2"] = overlap(psi[..., :, :-2], psi[..., :, 2:], np.sqrt(n[:, 2:] * (n[:, 2:] - 1)))
    out["a_R_a_L"] = overlap(psi[..., :-1, :-1], psi[..., 1:, 1:], np.sqrt(m[1:] * n[:, 1:]))
    # <a_R^+ a_L> = sum conj(psi[m-1, n+1]) sqrt(m) sqrt(n+1) psi[m, n]
    out["adag_R_a_L"] = overlap(psi[..., :-1, 1:], psi[..., 1:, :-1], np.sqrt(m[1:] * (n[:, :-1] + 1)))
    return out


def mode_moments(state: JointState) -> MomentRecord:
    mom = _moment_arrays(state.psi)
    c = lambda k: complex(mom[k])  # noqa: E731
    return MomentRecord(
        a_L=c("a_L"), a_R=c("a_R"),
        adag_L=c("a_L").conjugate(), adag_R=c("a_R").conjugate(),
        n_L=float(mom["n_L"]), n_R=float(mom["n_R"]),
        a_L2=c("a_L2"), a_R2=c("a_R2"),
        adag_L2=c("a_L2").conjugate(), adag_R2=c("a_R2").conjugate(),
        a_R_a_L=c("a_R_a_L"), adag_R_adag_L=c("a_R_a_L").conjugate(),
        adag_R_a_L=c("adag_R_a_L"), a_R_adag_L=c("adag_R_a_L").conjugate(),
    )


def _duan(mom: dict) -> np.ndarray:
    aL, aR, aRaL = mom["a_L"], mom["a_R"], mom["a_R_a_L"]
    total = 2.0 * (
        1.0 + mom["n_R"] + mom["n_L"] + np.conj(aRaL) + aRaL
        - aR * np.conj(aR) - aL * np.conj(aL)
        - np.conj(aR) * np.conj(aL) - aR * aL
    )
    if np.any(np.abs(total.imag) > IMAG_TOL):
        raise NumericalInconsistency(f"total variance has imaginary part {np.max(np.abs(total.imag)):.3e}")
    return total.real


def _squeezing(mom: dict):
    nsum = 1.0 + mom["n_R"] + mom["n_L"]
    cross = 2.0 * mom["adag_R_a_L"].real
    pair = mom["a_R2"].real + mom["a_L2"].real + 2.0 * mom["a_R_a_L"].real
    # <c+^2>, <c-^2> in normal order; <c+> = sqrt2 Re(<a_R>+<a_L>), <c-> = sqrt2 Im(...)
    mean = mom["a_R"] + mom["a_L"]
    sq_plus = nsum + cross + pair - 2.0 * mean.real**2
    sq_minus = nsum + cross - pair - 2.0 * mean.imag**2
    return sq_plus, sq_minus


def _check_leakage(state: JointState):
    if state.leakage >= LEAKAGE_TOL:
        raise NumericalInconsistency(f"truncation leakage {state.leakage:.3e} too large for moments")


def duan_total_variance(state: JointState) -> float:
    """Delta u^2 + Delta v^2 for u = x_R + x_L, v = p_R - p_L (separable bound 2)."""
    _check_leakage(state)
    return float(_duan(_moment_arrays(state.psi)))


def squeezing_variances(state: JointState):
    """(Delta c_+^2, Delta c_-^2) for c_+ = x_R + x_L, c_- = p_R + p_L."""
    _check_leakage(state)
    sp, sm = _squeezing(_moment_arrays(state.psi))
    return float(sp), float(sm)


def observe(psi: np.ndarray, residual_mass, t) -> dict:
    """All row columns for a batch of states, keyed by column name."""
    mom = _moment_arrays(psi)
    rho = atom_rho(psi)
    eps = np.linalg.eigvalsh(rho)
    sq_plus, sq_minus = _squeezing(mom)
    return {
        "t": np.asarray(t, dtype=float),
        "entropy": entropy_from_eigenvalues(eps),
        "rho11": rho[..., 0, 0].real,
        "rho22": rho[..., 1, 1].real,
        "rho33": rho[..., 2, 2].real,
        "duan_total": _duan(mom),
        "sq_plus": sq_plus,
        "sq_minus": sq_minus,
        "mean_nL": mom["n_L"],
        "mean_nR": mom["n_R"],
        "norm": mom["norm"],
        "residual_mass": np.broadcast_to(residual_mass, np.shape(mom["norm"])).astype(float),
    }


def observe_state(state: JointState, t: float = 0.0, residual_mass: float = 0.0) -> ObservableRow:
    cols = observe(state.psi, residual_mass, t)
    return ObservableRow(**{k: float(v) for k, v in cols.items()})

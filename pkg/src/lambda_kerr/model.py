"""Physical parameters of the driven Lambda atom in a two-mode Kerr cavity.

All rates are in units of the common vacuum Rabi frequency, so time is
measured as ``lambda * t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

BETA_VALUES = (-0.5, 0.0, 0.5)


class ModelError(ValueError):
    """Raised for physically inconsistent model parameters."""


@dataclass(frozen=True)
class ModelParams:
    """Constants of the Hamiltonian.

    Attributes:
        delta_L, delta_R: detunings of the left and right cavity modes.
        chi_L, chi_R: self-Kerr coefficients.
        chi_C: cross-Kerr coefficient.
        lambda_L, lambda_R: vacuum Rabi frequencies.
        beta: exponent of the intensity-dependent coupling n**beta.
        omega_rabi: Rabi frequency of the classical drive on |1> <-> |3>.
        absolute_freqs: optional (omega_L, omega_R, omega_2), needed only
            for the full-phase frame.
    """

    delta_L: float = 0.0
    delta_R: float = 0.0
    chi_L: float = 0.0
    chi_R: float = 0.0
    chi_C: float = 0.0
    lambda_L: float = 1.0
    lambda_R: float = 1.0
    beta: float = 0.0
    omega_rabi: complex = 0.0
    absolute_freqs: Optional[Tuple[float, float, float]] = field(default=None)

    def validate(self) -> "ModelParams":
        return validate(self)


def validate(params: ModelParams) -> ModelParams:
    """Check every invariant of ``params`` and return it unchanged."""
    reals = {
        "delta_L": params.delta_L,
        "delta_R": params.delta_R,
        "chi_L": params.chi_L,
        "chi_R": params.chi_R,
        "chi_C": params.chi_C,
        "lambda_L": params.lambda_L,
        "lambda_R": params.lambda_R,
    }
    for name, value in reals.items():
        if isinstance(value, complex) or not math.isfinite(value):
            raise ModelError(f"{name} must be a finite real number, got {value!r}")
    for name in ("lambda_L", "lambda_R"):
        if reals[name] <= 0:
            raise ModelError(f"{name} must be strictly positive, got {reals[name]!r}")
    for name in ("chi_L", "chi_R", "chi_C"):
        if reals[name] < 0:
            raise ModelError(f"{name} must be non-negative, got {reals[name]!r}")
    if params.beta not in BETA_VALUES:
        raise ModelError(f"beta must be one of {BETA_VALUES}, got {params.beta!r}")
    omega = complex(params.omega_rabi)
    if not (math.isfinite(omega.real) and math.isfinite(omega.imag)):
        raise ModelError(f"omega_rabi must be finite, got {params.omega_rabi!r}")

    if params.absolute_freqs is not None:
        if len(params.absolute_freqs) != 3:
            raise ModelError("absolute_freqs must be (omega_L, omega_R, omega_2)")
        w_L, w_R, w_2 = (float(w) for w in params.absolute_freqs)
        if not all(math.isfinite(w) and w > 0 for w in (w_L, w_R, w_2)):
            raise ModelError(f"absolute_freqs must be positive, got {params.absolute_freqs!r}")
        # implied lower-level energies w_1 = w_2 - w_L - delta_L, w_3 = w_2 - w_R - delta_R
        # must lie below the upper level for a Lambda configuration
        if w_L + params.delta_L <= 0 or w_R + params.delta_R <= 0:
            raise ModelError(
                "absolute_freqs inconsistent with detunings: implied lower levels "
                "are not below the upper level"
            )
    return params


@dataclass(frozen=True)
class AtomInit:
    """Initial atomic amplitudes on |1>, |2>, |3>."""

    a: complex = 0.0
    b: complex = 1.0
    c: complex = 0.0

    def __post_init__(self):
        norm = abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ModelError(f"atomic amplitudes must be normalized, |a|^2+|b|^2+|c|^2 = {norm!r}")

    @classmethod
    def level(cls, i: int) -> "AtomInit":
        """Atom prepared in bare level ``i`` (1, 2 or 3)."""
        if i not in (1, 2, 3):
            raise ModelError(f"atomic level must be 1, 2 or 3, got {i!r}")
        amps = [0.0, 0.0, 0.0]
        amps[i - 1] = 1.0
        return cls(*amps)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c], dtype=complex)


def coupling_f(n, beta):
    """Intensity-dependent coupling ``f(n) = n**beta``.

    ``f`` is identically 1 for ``beta == 0`` (including n = 0). For
    ``beta == -1/2`` the value at n = 0 is undefined and raises.
    Accepts integers or integer arrays.
    """
    if beta not in BETA_VALUES:
        raise ModelError(f"beta must be one of {BETA_VALUES}, got {beta!r}")
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ModelError("photon number must be non-negative")
    if beta == 0.0:
        out = np.ones(n_arr.shape, dtype=float)
    elif beta == 0.5:
        out = np.sqrt(n_arr.astype(float))
    else:
        if np.any(n_arr == 0):
            raise ModelError("f(0) is singular for beta = -1/2")
        out = 1.0 / np.sqrt(n_arr.astype(float))
    return float(out) if out.ndim == 0 else out


def kerr_R(n, chi):
    """Self-Kerr energy ``chi * n * (n - 1)``."""
    return chi * n * (n - 1)


def cross_kerr(nL, nR, chi_c):
    """Cross-Kerr energy ``chi_c * nL * nR``."""
    # grouped so the result is exactly symmetric in (nL, nR)
    return chi_c * (nL * nR)


def diagonal_energy(level, nL, nR, params: ModelParams):
    """Diagonal of the rotating-frame Hamiltonian on the bare label |level, nL, nR>."""
    detuning = 0.0
    if level == 1:
        detuning = -params.delta_L
    elif level == 3:
        detuning = -params.delta_R
    return (
        detuning
        + kerr_R(nL, params.chi_L)
        + kerr_R(nR, params.chi_R)
        + cross_kerr(nL, nR, params.chi_C)
    )

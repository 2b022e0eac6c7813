"""Dressed states of a single (N1, N2) excitation subspace.

For fixed photon labels (nL, nR) the three bare states

    |1, nL+1, nR>,  |2, nL, nR>,  |3, nL, nR+1>

are closed under the interaction Hamiltonian, which acts on them as the
Hermitian 3x3 matrix

    [[r1,       conj(vL), omega],
     [vL,       r2,       vR   ],
     [conj(om), conj(vR), r3   ]]

Everything in this module is vectorized: ``nL`` and ``nR`` may be integer
arrays, in which case a :class:`SubspaceBlock` describes a whole batch of
blocks and every derived quantity carries the same leading shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams, coupling_f, cross_kerr, kerr_R

CLOSED_FORM = "closed-form"
NUMERIC = "numeric-fallback"

# relative eigenvalue gap below which the closed-form vectors are abandoned
GAP_TOL = 1e-4
# unitarity / reconstruction residuals a closed-form block must meet
UNITARITY_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-11
ARCCOS_SLACK = 1e-9


class FallbackRequired(ArithmeticError):
    """The closed-form roots are ill-conditioned for this block."""


@dataclass(frozen=True, eq=False)
class SubspaceBlock:
    nL: np.ndarray
    nR: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    vL: np.ndarray
    vR: np.ndarray
    omega: complex

    @property
    def N1(self):
        return np.asarray(self.nL) + 1

    @property
    def N2(self):
        return np.asarray(self.nR) + 1

    @property
    def shape(self):
        return np.broadcast(self.r1, self.r2, self.r3, self.vL, self.vR).shape

    @property
    def matrix(self) -> np.ndarray:
        """The block Hamiltonian(s), shape ``(..., 3, 3)``."""
        shape = self.shape
        H = np.zeros(shape + (3, 3), dtype=complex)
        vL = np.broadcast_to(np.asarray(self.vL, dtype=complex), shape)
        vR = np.broadcast_to(np.asarray(self.vR, dtype=complex), shape)
        H[..., 0, 0] = self.r1
        H[..., 1, 1] = self.r2
        H[..., 2, 2] = self.r3
        H[..., 0, 1] = vL.conj()
        H[..., 1, 0] = vL
        H[..., 1, 2] = vR
        H[..., 2, 1] = vR.conj()
        H[..., 0, 2] = self.omega
        H[..., 2, 0] = np.conj(self.omega)
        return H

    @classmethod
    def from_entries(cls, r1, r2, r3, vL, vR, omega, nL=0, nR=0) -> "SubspaceBlock":
        """Block from raw matrix entries, for tests and diagnostics."""
        arr = lambda x: np.asarray(x, dtype=float)  # noqa: E731
        return cls(
            nL=np.asarray(nL), nR=np.asarray(nR),
            r1=arr(r1), r2=arr(r2), r3=arr(r3),
            vL=np.asarray(vL, dtype=complex), vR=np.asarray(vR, dtype=complex),
            omega=np.asarray(omega, dtype=complex),
        )


@dataclass(frozen=True, eq=False)
class SubspaceEigensystem:
    """Eigenvalues (ascending) and eigenvector columns of a block batch.

    ``closed_form`` is a boolean mask; False entries were diagonalized by
    the Jacobi fallback. ``Y`` holds the characteristic-cubic invariants.
    """

    energies: np.ndarray
    vectors: np.ndarray
    closed_form: np.ndarray
    Y: np.ndarray

    @property
    def method(self):
        if np.ndim(self.closed_form) == 0:
            return CLOSED_FORM if self.closed_form else NUMERIC
        return np.where(self.closed_form, CLOSED_FORM, NUMERIC)


def block_coefficients(nL, nR, params: ModelParams) -> SubspaceBlock:
    """Matrix entries of the (nL, nR) block(s)."""
    nL = np.asarray(nL)
    nR = np.asarray(nR)
    if np.any(nL < 0) or np.any(nR < 0):
        raise ValueError("photon labels must be non-negative")
    chi_L, chi_R, chi_C = params.chi_L, params.chi_R, params.chi_C
    r1 = -params.delta_L + kerr_R(nL + 1, chi_L) + kerr_R(nR, chi_R) + cross_kerr(nL + 1, nR, chi_C)
    r2 = kerr_R(nL, chi_L) + kerr_R(nR, chi_R) + cross_kerr(nL, nR, chi_C)
    r3 = -params.delta_R + kerr_R(nL, chi_L) + kerr_R(nR + 1, chi_R) + cross_kerr(nL, nR + 1, chi_C)
    vL = params.lambda_L * coupling_f(nL + 1, params.beta) * np.sqrt(nL + 1.0)
    vR = params.lambda_R * coupling_f(nR + 1, params.beta) * np.sqrt(nR + 1.0)
    shape = np.broadcast(nL, nR).shape
    as_float = lambda x: np.broadcast_to(np.asarray(x, dtype=float), shape)  # noqa: E731
    return SubspaceBlock(
        nL=nL, nR=nR,
        r1=as_float(r1), r2=as_float(r2), r3=as_float(r3),
        vL=as_float(vL).astype(complex), vR=as_float(vR).astype(complex),
        omega=np.complex128(params.omega_rabi),
    )


def cubic_invariants(block: SubspaceBlock) -> np.ndarray:
    """Coefficients (Y1, Y2, Y3) of E^3 + Y1 E^2 + Y2 E + Y3 = 0, shape (..., 3)."""
    r1, r2, r3 = block.r1, block.r2, block.r3
    vL = np.asarray(block.vL)
    vR = np.asarray(block.vR)
    om = np.asarray(block.omega)
    aL, aR, aO = np.abs(vL) ** 2, np.abs(vR) ** 2, np.abs(om) ** 2
    Y1 = -(r1 + r2 + r3)
    Y2 = r1 * r2 + r2 * r3 + r1 * r3 - (aL + aR + aO)
    Y3 = r1 * aR + r2 * aO + r3 * aL - (r1 * r2 * r3 + 2.0 * np.real(vL * np.conj(vR) * om))
    return np.stack(np.broadcast_arrays(Y1, Y2, Y3), axis=-1).astype(float)


def _scale(block: SubspaceBlock) -> np.ndarray:
    return np.max(np.abs(block.matrix), axis=(-1, -2))


def _trig_roots(Y: np.ndarray, scale: np.ndarray):
    """Trigonometric roots, ascending; returns (E, ok, arccos_argument)."""
    Y1, Y2, Y3 = Y[..., 0], Y[..., 1], Y[..., 2]
    p = Y1 * Y1 - 3.0 * Y2
    # absolute floor keeps p**1.5 clear of underflow; tinier blocks go to Jacobi
    ok = p > np.maximum((1e-8 * scale) ** 2, 1e-150)
    p_safe = np.where(ok, p, 1.0)
    x = (9.0 * Y1 * Y2 - 2.0 * Y1**3 - 27.0 * Y3) / (2.0 * p_safe**1.5)
    theta = np.arccos(np.clip(x, -1.0, 1.0))
    k = np.arange(3)
    E = (-Y1 / 3.0)[..., None] + (2.0 / 3.0) * np.sqrt(p_safe)[..., None] * np.cos(
        theta[..., None] / 3.0 - 2.0 * np.pi * k / 3.0
    )
    return np.sort(E, axis=-1), ok, x


def eigenvalues_closed(block: SubspaceBlock) -> np.ndarray:
    """Closed-form roots of det(H - E) = 0, ascending along the last axis.

    Raises:
        FallbackRequired: some block is (near) a triple root.
        ArithmeticError: the arccos argument left [-1, 1] by more than
            rounding, which a Hermitian block cannot produce.
    """
    Y = cubic_invariants(block)
    E, ok, x = _trig_roots(Y, _scale(block))
    if not np.all(ok):
        raise FallbackRequired("near-triple root; closed form is ill-conditioned")
    if np.any(np.abs(x) > 1.0 + ARCCOS_SLACK):
        raise ArithmeticError(f"arccos argument {np.max(np.abs(x))!r} outside [-1, 1]")
    return E


def _closed_vectors(block: SubspaceBlock, E: np.ndarray) -> np.ndarray:
    """Eigenvector columns from the 1st/3rd-row cross product, unnormalized.

    Equal to the usual component formulas multiplied through by (E - r3), which
    removes the pole at E = r3.
    """
    r1 = np.asarray(block.r1)[..., None]
    r3 = np.asarray(block.r3)[..., None]
    vLc = np.conj(np.asarray(block.vL))[..., None]
    vRc = np.conj(np.asarray(block.vR))[..., None]
    om = np.asarray(block.omega)[..., None]
    d1 = E - r1
    d3 = E - r3
    a = vLc * d3 + vRc * om
    b = d1 * d3 - np.abs(om) ** 2
    c = vRc * d1 + vLc * np.conj(om)
    # stack components as rows -> columns index the eigenvalue
    return np.stack(np.broadcast_arrays(a, b, c), axis=-2)


def jacobi_eigh(H: np.ndarray, sweeps: int = 12):
    """Cyclic Jacobi diagonalization of a batch of small Hermitian matrices.

    Returns ascending eigenvalues and the unitary whose columns are the
    eigenvectors.
    """
    A = np.array(H, dtype=complex)
    n = A.shape[-1]
    batch = A.shape[:-2]
    V = np.broadcast_to(np.eye(n, dtype=complex), A.shape).copy()
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    for _ in range(sweeps):
        off = np.sqrt(sum(np.abs(A[..., p, q]) ** 2 for p, q in pairs))
        diag = np.max(np.abs(np.diagonal(A, axis1=-2, axis2=-1)), axis=-1)
        if np.all(off <= 1e-300 + 1e-17 * diag):
            break
        for p, q in pairs:
            apq = A[..., p, q]
            mag = np.abs(apq)
            live = mag > 0
            z = np.where(live, apq / np.where(live, mag, 1.0), 1.0)
            with np.errstate(over="ignore", divide="ignore"):
                tau = (A[..., q, q].real - A[..., p, p].real) / (2.0 * np.where(live, mag, 1.0))
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            t = np.where(live, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            G = np.broadcast_to(np.eye(n, dtype=complex), batch + (n, n)).copy()
            # G = diag(1, conj(z)) on (p, q), then real rotation [[c, s], [-s, c]]
            G[..., p, p] = c
            G[..., p, q] = s
            G[..., q, p] = -s * np.conj(z)
            G[..., q, q] = c * np.conj(z)
            A = np.swapaxes(G.conj(), -1, -2) @ A @ G
            A[..., p, q] = 0.0
            A[..., q, p] = 0.0
            V = V @ G
    w = np.diagonal(A, axis1=-2, axis2=-1).real
    order = np.argsort(w, axis=-1)
    w = np.take_along_axis(w, order, axis=-1)
    V = np.take_along_axis(V, order[..., None, :], axis=-1)
    return w, V


def _residuals(H, E, V):
    eye = np.eye(3)
    unit = np.max(np.abs(np.swapaxes(V.conj(), -1, -2) @ V - eye), axis=(-1, -2))
    recon = np.max(np.abs(H @ V - V * E[..., None, :]), axis=(-1, -2))
    return unit, recon


def eigensystem(block: SubspaceBlock) -> SubspaceEigensystem:
    """Diagonalize every block, closed form where well-conditioned."""
    H = block.matrix
    scale = np.max(np.abs(H), axis=(-1, -2))
    Y = cubic_invariants(block)
    E, ok, x = _trig_roots(Y, scale)
    ok = ok & (np.abs(x) <= 1.0 + ARCCOS_SLACK)

    span = np.maximum(E[..., 2] - E[..., 0], 1e-300)
    gap = np.minimum(E[..., 1] - E[..., 0], E[..., 2] - E[..., 1])
    ok &= gap > GAP_TOL * span

    U = _closed_vectors(block, E)
    lengths = np.linalg.norm(U, axis=-2)
    # cross product of nearly parallel rows loses all precision
    ok &= np.all(lengths > 1e-4 * np.maximum(scale, 1e-300)[..., None] ** 2, axis=-1)
    V = U / np.where(lengths > 0, lengths, 1.0)[..., None, :]

    unit, recon = _residuals(H, E, V)
    ok &= (unit < UNITARITY_TOL) & (recon < RECONSTRUCTION_TOL * (1.0 + scale))

    if not np.all(ok):
        bad = ~ok
        E_num, V_num = jacobi_eigh(H[bad])
        E = E.copy()
        V = V.copy()
        E[bad] = E_num
        V[bad] = V_num
    return SubspaceEigensystem(energies=E, vectors=V, closed_form=ok, Y=Y)


def propagator(eig: SubspaceEigensystem, t: float) -> np.ndarray:
    """U(t) = V diag(exp(-i E t)) V^dagger for every block."""
    V = eig.vectors
    phases = np.exp(-1j * eig.energies * t)
    return (V * phases[..., None, :]) @ np.swapaxes(V.conj(), -1, -2)

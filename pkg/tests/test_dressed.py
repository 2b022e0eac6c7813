import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from lambda_kerr.dressed import (
    FallbackRequired,
    SubspaceBlock,
    block_coefficients,
    cubic_invariants,
    eigensystem,
    eigenvalues_closed,
    jacobi_eigh,
    propagator,
)
from lambda_kerr.model import BETA_VALUES, ModelParams
from lambda_kerr.oracle import build_block_hamiltonian
from lambda_kerr.selftest import random_blocks

finite = st.floats(-20, 20, allow_nan=False)


def block_from(draw_vals):
    r1, r2, r3, a, b, c, d, e, f = draw_vals
    return SubspaceBlock.from_entries(r1, r2, r3, a + 1j * b, c + 1j * d, e + 1j * f)


def residuals(H, eig):
    V, E = eig.vectors, eig.energies
    unit = np.max(np.abs(np.swapaxes(V.conj(), -1, -2) @ V - np.eye(3)))
    recon = np.max(np.abs(V * E[..., None, :] @ np.swapaxes(V.conj(), -1, -2) - H))
    return unit, recon


def test_random_blocks_batch():
    blocks = random_blocks(np.random.default_rng(1), 5000)
    eig = eigensystem(blocks)
    unit, recon = residuals(blocks.matrix, eig)
    assert unit < 1e-10 and recon < 1e-9
    np.testing.assert_allclose(eig.energies, np.linalg.eigvalsh(blocks.matrix), atol=1e-9)
    # generic blocks stay on the closed-form path
    assert eig.closed_form.mean() > 0.99


@given(st.lists(finite, min_size=9, max_size=9))
@settings(max_examples=200, deadline=None)
def test_closed_form_matches_numeric(vals):
    block = block_from(vals)
    H = block.matrix
    eig = eigensystem(block)
    unit, recon = residuals(H, eig)
    assert unit < 1e-10
    assert recon < 1e-9 * (1 + np.max(np.abs(H)))
    np.testing.assert_allclose(eig.energies, np.linalg.eigvalsh(H), atol=1e-9 * (1 + np.max(np.abs(H))))


def test_cubic_invariants_match_characteristic_polynomial(rng):
    blocks = random_blocks(rng, 50)
    Y = cubic_invariants(blocks)
    for k in range(50):
        coeffs = np.poly(blocks.matrix[k])
        np.testing.assert_allclose(Y[k], coeffs[1:].real, rtol=1e-10, atol=1e-8)


@pytest.mark.parametrize(
    "entries",
    [
        (1.0, 1.0, 1.0, 0, 0, 0),  # triple root
        (0.0, 0.0, 5.0, 0, 0, 0),  # diagonal double root
        (2.0, 2.0, 2.0, 0, 1e-9, 0),  # near-triple
        (0.0, 0.0, 0.0, 1.0, 1.0, 0.0),  # zero middle root, cross product degenerates
        (1.0, 3.0, 1.0, 1.0, 0.0, 0.0),  # decoupled level 3 at E = r1
    ],
)
def test_degenerate_blocks(entries):
    block = SubspaceBlock.from_entries(*entries)
    eig = eigensystem(block)
    unit, recon = residuals(block.matrix, eig)
    assert unit < 1e-10 and recon < 1e-9


def test_triple_root_needs_fallback():
    block = SubspaceBlock.from_entries(2.0, 2.0, 2.0, 0, 0, 0)
    with pytest.raises(FallbackRequired):
        eigenvalues_closed(block)
    assert eigensystem(block).method == "numeric-fallback"


def test_complex_drive_eigenvectors():
    # a complex drive exercises the conjugate on Omega in the third component
    block = SubspaceBlock.from_entries(0.3, -0.2, 0.9, 1.1 + 0.2j, 0.7 - 0.5j, 0.4 + 1.3j)
    eig = eigensystem(block)
    assert eig.method == "closed-form"
    unit, recon = residuals(block.matrix, eig)
    assert unit < 1e-13 and recon < 1e-12


def test_resonant_vacuum_block():
    eig = eigensystem(block_coefficients(0, 0, ModelParams()))
    np.testing.assert_allclose(eig.energies, [-np.sqrt(2), 0.0, np.sqrt(2)], atol=1e-14)


@pytest.mark.parametrize("beta", BETA_VALUES)
def test_block_entries_match_dense_hamiltonian(beta):
    params = ModelParams(delta_L=0.2, delta_R=0.4, chi_L=0.1, chi_R=0.3, chi_C=0.05, lambda_L=1.5, lambda_R=0.7, beta=beta, omega_rabi=0.8 - 0.3j)
    dense = build_block_hamiltonian(params, 4, 4)
    nL, nR = np.meshgrid(np.arange(3), np.arange(3), indexing="ij")
    blocks = block_coefficients(nL, nR, params).matrix
    for i in range(3):
        for j in range(3):
            labels = [(1, i + 1, j), (2, i, j), (3, i, j + 1)]
            idx = [dense.index[lab] for lab in labels]
            np.testing.assert_allclose(blocks[i, j], dense.matrix[np.ix_(idx, idx)], atol=1e-14)


def test_block_coefficients_reject_negative():
    with pytest.raises(ValueError):
        block_coefficients(-1, 0, ModelParams())


def test_jacobi_matches_eigh(rng):
    H = random_blocks(rng, 500).matrix
    w, V = jacobi_eigh(H)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(H), atol=1e-11)
    assert np.max(np.abs(np.swapaxes(V.conj(), -1, -2) @ V - np.eye(3))) < 1e-12
    assert np.max(np.abs(H @ V - V * w[..., None, :])) < 1e-10


def test_jacobi_wide_dynamic_range():
    H = np.diag([1e12, -1e-12, 3.0]).astype(complex)
    H[0, 1] = H[1, 0] = 1e-6
    w, V = jacobi_eigh(H[None])
    np.testing.assert_allclose(w[0], np.linalg.eigvalsh(H), rtol=1e-12, atol=1e-12)


def test_propagator_matches_expm(rng):
    blocks = random_blocks(rng, 20)
    U = propagator(eigensystem(blocks), 0.7)
    for k in range(20):
        np.testing.assert_allclose(U[k], scipy.linalg.expm(-0.7j * blocks.matrix[k]), atol=1e-10)

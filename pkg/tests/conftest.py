import numpy as np
import pytest

from lambda_kerr.fock import FieldSpec, make_initial_state
from lambda_kerr.model import AtomInit


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def tmsv_state(r: float, nmax: int, sign: int = -1):
    """Two-mode squeezed vacuum sum_n c_n |2, n, n> with c_n ~ (sign tanh r)^n, renormalized."""
    n = np.arange(nmax + 1)
    c = (sign * np.tanh(r)) ** n / np.cosh(r)
    c = c / np.linalg.norm(c)
    psi = np.zeros((3, nmax + 1, nmax + 1), dtype=complex)
    psi[1, n, n] = c
    from lambda_kerr.fock import JointState

    return JointState(psi)


def product_state(alpha_L, alpha_R, level=2, **kw):
    return make_initial_state(AtomInit.level(level), FieldSpec.coherent(alpha_L, **kw), FieldSpec.coherent(alpha_R, **kw))

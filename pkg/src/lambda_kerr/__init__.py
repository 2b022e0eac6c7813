"""Exact dynamics of a Lambda-type three-level atom in two Kerr-coupled cavity modes.

Typical use::

    from lambda_kerr import ModelParams, AtomInit, FieldSpec, make_initial_state, time_sweep

    params = ModelParams(chi_C=0.01)
    psi0 = make_initial_state(AtomInit.level(2), FieldSpec.coherent(5.0), FieldSpec.coherent(5.0))
    series = time_sweep(psi0, params, np.linspace(0, 25, 500))
"""

from .dressed import SubspaceBlock, SubspaceEigensystem, block_coefficients, eigensystem, propagator
from .evolve import Evolver, ObservableSeries, evolve_state, time_sweep
from .fock import FieldSpec, JointState, TruncationError, make_initial_state
from .model import AtomInit, ModelError, ModelParams
from .observables import duan_total_variance, observe_state, squeezing_variances
from .oracle import build_block_hamiltonian, build_literal_hamiltonian, evolve_oracle, oracle_check
from .scenario import ConfigError, ScenarioConfig, load_config, preset, preset_ids

__version__ = "0.1.0"

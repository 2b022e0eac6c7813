"""Built-in consistency checks run by ``lambda-kerr selftest``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .dressed import SubspaceBlock, eigenvalues_closed, eigensystem
from .evolve import Evolver, time_sweep
from .fock import FieldSpec, make_initial_state
from .model import BETA_VALUES, AtomInit, ModelParams
from .observables import LN3, dem, field_entropy
from .oracle import oracle_check


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_blocks(rng, count: int, span: float = 10.0) -> SubspaceBlock:
    """Random Hermitian 3x3 blocks with entries in [-span, span]."""
    u = lambda *shape: rng.uniform(-span, span, shape)  # noqa: E731
    return SubspaceBlock.from_entries(
        u(count), u(count), u(count),
        u(count) + 1j * u(count), u(count) + 1j * u(count), u(count) + 1j * u(count),
    )


def random_params(rng, beta, omega=0.0) -> ModelParams:
    return ModelParams(
        delta_L=rng.uniform(0, 1), delta_R=rng.uniform(0, 1),
        chi_L=rng.uniform(0, 1), chi_R=rng.uniform(0, 1), chi_C=rng.uniform(0, 1),
        lambda_L=rng.uniform(0.5, 2), lambda_R=rng.uniform(0.5, 2),
        beta=beta, omega_rabi=omega,
    )


def random_small_state(rng, max_photons: int = 3):
    def amps():
        g = rng.normal(size=rng.integers(1, max_photons + 2)) + 1j * rng.normal(size=1)
        return g / np.linalg.norm(g)

    a = rng.normal(size=3) + 1j * rng.normal(size=3)
    return make_initial_state(
        AtomInit(*(a / np.linalg.norm(a))),
        FieldSpec.explicit(amps()),
        FieldSpec.explicit(amps()),
    )


def _block_checks(rng, eigensystem_fn, count) -> List[CheckResult]:
    blocks = random_blocks(rng, count)
    H = blocks.matrix
    eig = eigensystem_fn(blocks)
    V, E = eig.vectors, eig.energies
    unit = np.max(np.abs(np.swapaxes(V.conj(), -1, -2) @ V - np.eye(3)), axis=(-1, -2))
    scale = np.max(np.abs(H), axis=(-1, -2))
    recon = np.max(np.abs(V * E[..., None, :] @ np.swapaxes(V.conj(), -1, -2) - H), axis=(-1, -2)) / (1 + scale)
    trace = np.abs(E.sum(-1) - np.trace(H, axis1=-2, axis2=-1).real)
    closed = np.max(np.abs(eigenvalues_closed(blocks) - np.linalg.eigvalsh(H)))

    def worst(name, values, tol):
        k = int(np.argmax(values))
        return CheckResult(name, bool(values[k] < tol), f"max {values[k]:.2e} (block #{k}) vs tol {tol:.0e}")

    return [
        worst("V unitarity", unit, 1e-10),
        worst("spectral reconstruction", recon, 1e-9),
        worst("trace identity", trace, 1e-9),
        CheckResult("closed-form vs numeric eigenvalues", bool(closed < 1e-9), f"max {closed:.2e} vs tol 1e-09"),
    ]


def _sweep_checks(rng, eigensystem_fn) -> List[CheckResult]:
    results = []
    grid = np.linspace(0, 10, 41)
    for beta in BETA_VALUES:
        params = random_params(rng, beta, omega=rng.uniform(-2, 2))
        state = make_initial_state(AtomInit.level(2), FieldSpec.coherent(1.2), FieldSpec.coherent(0.8j))
        ev = Evolver(state, params, eigensystem_fn)
        series = time_sweep(state, params, grid, evolver=ev)
        drift = float(np.max(np.abs(series["norm"] - state.norm())))
        ent = series["entropy"]
        heis = float(np.min(series["sq_plus"] * series["sq_minus"]))
        araki = max(abs(dem(s) - field_entropy(s)) for s in (ev.state_at(t) for t in grid[::10]))
        tag = f"beta={beta:+.1f}"
        results += [
            CheckResult(f"norm conservation {tag}", drift < 1e-10, f"max drift {drift:.2e}"),
            CheckResult(
                f"entropy range {tag}",
                bool(ent.min() >= 0 and ent.max() <= LN3 + 1e-10),
                f"[{ent.min():.3e}, {ent.max():.6f}]",
            ),
            CheckResult(f"Heisenberg floor {tag}", heis >= 1 - 1e-8, f"min product {heis:.6f}"),
            CheckResult(f"atom/field entropy equality {tag}", araki < 1e-8, f"max gap {araki:.2e}"),
        ]
    return results


def _oracle_checks(rng, sets: int) -> List[CheckResult]:
    grid = np.linspace(0, 10, 50)
    worst_plain = worst_drive = 0.0
    for k in range(sets):
        beta = BETA_VALUES[k % 3]
        state = random_small_state(rng)
        worst_plain = max(worst_plain, oracle_check(state, random_params(rng, beta), grid))
        omega = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        worst_drive = max(worst_drive, oracle_check(state, random_params(rng, beta, omega), grid))
    return [
        CheckResult("oracle equivalence, Omega = 0", worst_plain < 1e-9, f"max deviation {worst_plain:.2e}"),
        CheckResult("oracle equivalence, Omega != 0 (block variant)", worst_drive < 1e-9, f"max deviation {worst_drive:.2e}"),
    ]


def selftest(level: str = "fast", seed: int = 2024, eigensystem_fn: Callable = eigensystem) -> List[CheckResult]:
    """Run the invariant suite; ``full`` adds the dense-oracle comparison."""
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    rng = np.random.default_rng(seed)
    results = _block_checks(rng, eigensystem_fn, 2000 if level == "fast" else 10000)
    results += _sweep_checks(rng, eigensystem_fn)
    if level == "full":
        results += _oracle_checks(rng, 20)
    return results


def format_report(results: List[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}" for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)


def corrupt_normalization(factor: float = 1.0 + 1e-6) -> Callable:
    """Eigensolver wrapper that rescales every eigenvector; a negative control."""
    from .dressed import SubspaceEigensystem

    def broken(block):
        eig = eigensystem(block)
        return SubspaceEigensystem(eig.energies, eig.vectors * factor, eig.closed_form, eig.Y)

    return broken


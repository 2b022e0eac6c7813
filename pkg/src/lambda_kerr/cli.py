"""Command-line entry point.

    lambda-kerr run --preset fig3g-I --out fig3g.csv
    lambda-kerr run --config scenario.ini --oracle-check
    lambda-kerr selftest --level full
    lambda-kerr presets

Exit codes: 0 success, 1 configuration error, 2 invariant or oracle failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from typing import List, Optional

import numpy as np

from .evolve import Evolver, time_sweep
from .fock import FieldSpec, TruncationError, field_amplitudes, make_initial_state
from .model import ModelError
from .observables import COLUMNS, LN3
from .oracle import oracle_check
from .scenario import ConfigError, ScenarioConfig, load_config, preset, preset_ids
from .selftest import format_report, selftest

EXIT_OK, EXIT_CONFIG, EXIT_FAILURE = 0, 1, 2
ORACLE_TOL = 1e-9


def format_float(x: float) -> str:
    # repr gives the shortest string that round-trips, independent of locale
    return repr(float(x))


def series_to_csv(series) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for i in range(len(series)):
        writer.writerow([format_float(series[k][i]) for k in COLUMNS])
    return buf.getvalue()


def check_invariants(series, initial_norm: float) -> List[str]:
    """Violations of the sweep invariants, as human-readable messages."""
    problems = []
    drift = np.max(np.abs(series["norm"] - initial_norm))
    if drift > 1e-10:
        problems.append(f"norm drift {drift:.3e} exceeds 1e-10")
    ent = series["entropy"]
    if np.all(np.isfinite(ent)) and (ent.min() < 0 or ent.max() > LN3 + 1e-10):
        problems.append(f"entropy outside [0, ln 3]: [{ent.min():.3e}, {ent.max():.6f}]")
    pops = series["rho11"] + series["rho22"] + series["rho33"]
    if np.all(np.isfinite(pops)) and np.max(np.abs(pops - series["norm"])) > 1e-10:
        problems.append("populations do not sum to the norm")
    prod = series["sq_plus"] * series["sq_minus"]
    if np.all(np.isfinite(prod)) and prod.min() < 1 - 1e-8:
        problems.append(f"squeezing variances violate the uncertainty bound: {prod.min():.6f}")
    return problems


def small_oracle_state(config: ScenarioConfig):
    """The scenario's initial state with each field cut to ``oracle_nmax`` photons."""

    def shrink(spec: FieldSpec) -> FieldSpec:
        g = field_amplitudes(replace(spec, tail_eps=config.tail_eps))[: config.oracle_nmax + 1]
        norm = np.linalg.norm(g)
        if norm == 0:
            raise ConfigError("field has no weight below the oracle cutoff")
        return FieldSpec.explicit(g / norm)

    return make_initial_state(config.atom, shrink(config.left), shrink(config.right))


def run_scenario(config: ScenarioConfig, out=None, err=None) -> int:
    """Run one scenario and write its CSV. Returns the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        initial = config.initial_state()
    except (TruncationError, ModelError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG

    series = time_sweep(initial, config.params, config.grid, config.observers, evolver=Evolver(initial, config.params))
    text = series_to_csv(series)
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)

    failures = check_invariants(series, initial.norm())
    if config.oracle_check:
        small = small_oracle_state(config)
        grid = np.linspace(0.0, 10.0, 50)
        dev = oracle_check(small, config.params, grid, "block")
        print(f"oracle check (nmax={config.oracle_nmax}, block variant): max deviation {dev:.3e}", file=err)
        if dev >= ORACLE_TOL:
            failures.append(f"oracle deviation {dev:.3e} exceeds {ORACLE_TOL:.0e}")
        if config.params.omega_rabi != 0:
            lit = oracle_check(small, config.params, grid, "literal")
            print(f"oracle check (literal drive term, informational): max deviation {lit:.3e}", file=err)
    for msg in failures:
        print(f"invariant failure: {msg}", file=err)
    return EXIT_FAILURE if failures else EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lambda-kerr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evolve a scenario and write a CSV time series")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="figure preset id (see 'presets')")
    src.add_argument("--config", help="INI scenario file")
    run.add_argument("--out", help="output CSV path (default: stdout)")
    run.add_argument("--frame", choices=("interaction", "full"))
    run.add_argument("--tail-eps", type=float)
    run.add_argument("--oracle-check", action="store_true", help="compare against the dense oracle at small cutoffs")
    run.add_argument("--tmax", type=float, help="end of the time grid, in units of 1/lambda")
    run.add_argument("--steps", type=int, help="number of grid points")

    st = sub.add_parser("selftest", help="run the built-in invariant suite")
    st.add_argument("--level", choices=("fast", "full"), default="fast")

    sub.add_parser("presets", help="list preset ids")
    return parser


def _apply_overrides(config: ScenarioConfig, args) -> ScenarioConfig:
    changes = {}
    if args.out is not None:
        changes["output"] = args.out
    if args.frame is not None:
        changes["frame"] = "full-phase" if args.frame == "full" else "interaction"
    if args.tail_eps is not None:
        changes["tail_eps"] = args.tail_eps
    if args.oracle_check:
        changes["oracle_check"] = True
    if args.tmax is not None:
        changes["t_max"] = args.tmax
    if args.steps is not None:
        changes["steps"] = args.steps
    return replace(config, **changes) if changes else config


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK

    if args.command == "presets":
        print("\n".join(preset_ids()))
        return EXIT_OK
    if args.command == "selftest":
        results = selftest(args.level)
        print(format_report(results))
        return EXIT_OK if all(r.passed for r in results) else EXIT_FAILURE

    try:
        config = preset(args.preset) if args.preset else load_config(args.config)
        config = _apply_overrides(config, args)
    except (ConfigError, ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run_scenario(config)


if __name__ == "__main__":
    sys.exit(main())

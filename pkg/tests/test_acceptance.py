"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the status lines are
written straight to the terminal even when output capture is on.
"""

import math
import time

import numpy as np
import pytest
from scipy.signal import find_peaks

from lambda_kerr import cli
from lambda_kerr.dressed import eigensystem, eigenvalues_closed
from lambda_kerr.evolve import Evolver, time_sweep
from lambda_kerr.fock import FieldSpec, make_initial_state
from lambda_kerr.model import BETA_VALUES, AtomInit, ModelParams
from lambda_kerr.observables import LN3, dem, duan_total_variance, field_entropy, squeezing_variances
from lambda_kerr.oracle import oracle_check
from lambda_kerr.scenario import preset
from lambda_kerr.selftest import random_blocks, random_params, random_small_state

from conftest import product_state, tmsv_state


@pytest.fixture
def report(capsys):
    def emit(number, title, passed, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if passed else 'FAIL'}  {title}: {detail}")
        return passed

    return emit


def sweep(preset_id, t_max, steps, observers):
    cfg = preset(preset_id)
    grid = np.linspace(0.0, t_max, steps)
    return grid, time_sweep(cfg.initial_state(), cfg.params, grid, observers=observers)


def test_oracle_equivalence(report):
    rng = np.random.default_rng(1)
    grid = np.linspace(0, 10, 50)
    start = time.perf_counter()
    worst = {"plain": 0.0, "drive": 0.0}
    for k in range(100):
        beta = BETA_VALUES[k % 3]
        state = random_small_state(rng)
        assert max(state.nmax_L, state.nmax_R) <= 4
        worst["plain"] = max(worst["plain"], oracle_check(state, random_params(rng, beta), grid))
        omega = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        worst["drive"] = max(worst["drive"], oracle_check(state, random_params(rng, beta, omega), grid))
    elapsed = time.perf_counter() - start
    ok = worst["plain"] < 1e-9 and worst["drive"] < 1e-9 and elapsed < 60
    detail = f"max dev {worst['plain']:.2e} (Omega=0), {worst['drive']:.2e} (Omega!=0), {elapsed:.1f} s"
    assert report(1, "oracle equivalence", ok, detail)


def test_structural_suite(report):
    rng = np.random.default_rng(2)
    blocks = random_blocks(rng, 10_000)
    H = blocks.matrix
    eig = eigensystem(blocks)
    V, E = eig.vectors, eig.energies
    Vh = np.swapaxes(V.conj(), -1, -2)
    unit = np.max(np.abs(Vh @ V - np.eye(3)))
    recon = np.max(np.abs(V * E[..., None, :] @ Vh - H))
    closed = np.max(np.abs(eigenvalues_closed(blocks) - np.linalg.eigvalsh(H)))

    drift, ent_lo, ent_hi, araki = 0.0, np.inf, -np.inf, 0.0
    grid = np.linspace(0, 20, 101)
    for k in range(30):
        state = random_small_state(rng)
        params = random_params(rng, BETA_VALUES[k % 3], omega=rng.uniform(-2, 2) * (k % 2))
        ev = Evolver(state, params)
        series = time_sweep(state, params, grid, evolver=ev)
        drift = max(drift, np.max(np.abs(series["norm"] - state.norm())))
        ent_lo, ent_hi = min(ent_lo, series["entropy"].min()), max(ent_hi, series["entropy"].max())
        for t in grid[::20]:
            s = ev.state_at(t)
            araki = max(araki, abs(dem(s) - field_entropy(s)))
    for key in ("fig3a-I", "fig5e", "fig7c", "fig11a"):
        _, series = sweep(key, 50, 201, ["entropy"])
        drift = max(drift, np.max(np.abs(series["norm"] - series["norm"][0])))
        ent_lo, ent_hi = min(ent_lo, series["entropy"].min()), max(ent_hi, series["entropy"].max())

    ok = unit < 1e-10 and recon < 1e-9 and closed < 1e-9 and drift < 1e-10
    ok = ok and ent_lo >= 0 and ent_hi <= LN3 + 1e-10 and araki < 1e-8
    detail = (
        f"unitarity {unit:.1e}, reconstruction {recon:.1e}, eigenvalues {closed:.1e}, "
        f"norm drift {drift:.1e}, entropy [{ent_lo:.1e}, {ent_hi:.4f}], S_A-S_F {araki:.1e}"
    )
    assert report(2, "structural suite", ok, detail)


def test_vacuum_rabi_landmark(report):
    state = make_initial_state(AtomInit.level(2), FieldSpec.vacuum(), FieldSpec.vacuum())
    grid = np.linspace(0, 10, 1001)
    series = time_sweep(state, ModelParams(), grid, observers=["populations"])
    err = np.max(np.abs(series["rho22"] - np.cos(math.sqrt(2) * grid) ** 2))
    assert report(3, "rho22 = cos^2(sqrt2 t)", err < 1e-9, f"max error {err:.2e}")


def test_baselines(report):
    coh = [product_state(a, b) for a, b in [(0, 0), (5, 5), (2 - 1j, 0.5j)]]
    duan_err = max(abs(duan_total_variance(s) - 2) for s in coh)
    sq_err = max(abs(v - 1) for s in coh for v in squeezing_variances(s))
    r = 0.1
    # c_n ~ (-tanh r)^n correlates u = x_R + x_L, v = p_R - p_L; (+tanh r)^n squeezes c_- = p_R + p_L
    duan_tmsv = duan_total_variance(tmsv_state(r, 12, sign=-1))
    sq_tmsv = squeezing_variances(tmsv_state(r, 12, sign=+1))[1]
    ok = duan_err < 1e-9 and sq_err < 1e-9
    ok = ok and abs(duan_tmsv - 2 * math.exp(-2 * r)) < 1e-4 and abs(sq_tmsv - math.exp(-2 * r)) < 1e-4
    detail = (
        f"coherent |duan-2| {duan_err:.1e}, |sq-1| {sq_err:.1e}; TMSV duan {duan_tmsv:.6f} "
        f"(2e^-2r {2 * math.exp(-2 * r):.6f}), sq_minus {sq_tmsv:.6f} (e^-2r {math.exp(-2 * r):.6f})"
    )
    assert report(4, "baselines", ok, detail)


def test_fig3_cross_kerr_collapse(report):
    start = time.perf_counter()
    _, free = sweep("fig3a-I", 25, 1001, ["entropy"])
    _, strong = sweep("fig3g-I", 25, 1001, ["entropy"])
    elapsed = time.perf_counter() - start
    ratio = strong["entropy"].max() / free["entropy"].max()
    detail = f"max S(chi_c=1)/max S(chi_c=0) = {strong['entropy'].max():.4f}/{free['entropy'].max():.4f} = {ratio:.3f}, {elapsed:.1f} s"
    assert report(5, "fig3 entropy reduction", ratio < 0.9 and elapsed < 30, detail)


def test_fig5_steady_state(report):
    means = {}
    for key in ("fig5e", "fig5h"):
        grid, series = sweep(key, 50, 2001, ["entropy"])
        means[key] = series["entropy"][grid >= 20].mean()
    ok = means["fig5e"] > 0.5 and means["fig5h"] < 0.1
    detail = f"mean S on [20, 50]: chi_c=0.05 -> {means['fig5e']:.4f}, chi_c=1 -> {means['fig5h']:.4f}"
    assert report(6, "fig5 steady-state plateau", ok, detail)


def sub2_time(grid, duan, t_end):
    mask = (duan < 2) & (grid <= t_end)
    return float(np.sum(mask) * (grid[1] - grid[0]))


def test_fig7_entanglement_window(report):
    grid, strong = sweep("fig7c", 50, 5001, ["duan"])
    _, weak = sweep("fig7b", 50, 5001, ["duan"])
    early = strong["duan_total"][(grid > 0) & (grid <= 5)]
    window = {"200": sub2_time(grid, strong["duan_total"], 30), "100": sub2_time(grid, weak["duan_total"], 30)}
    late = strong["duan_total"][grid >= 30].min()
    ok = early.min() < 2 and window["200"] > window["100"] and late >= 2
    detail = (
        f"min on (0,5] {early.min():.4f}; time below 2 on [0,30]: Omega=200 {window['200']:.2f}, "
        f"Omega=100 {window['100']:.2f}; min on [30,50] {late:.4f}"
    )
    assert report(7, "fig7 DGCZ window", ok, detail)


def test_fig11_squeezing_oscillations(report):
    periods, minima, dips = {}, {}, {}
    for key, nbar in (("fig11a", 10), ("fig11b", 15), ("fig11c", 20)):
        grid, series = sweep(key, 50, 5001, ["squeezing"])
        sm = series["sq_minus"]
        peaks, _ = find_peaks(sm, prominence=1e-3)
        troughs, _ = find_peaks(-sm, prominence=1e-3)
        periods[nbar] = float(np.median(np.diff(grid[peaks])))
        minima[nbar] = sm.min()
        dips[nbar] = int(np.sum(sm[troughs] < 1))
    spread = (max(periods.values()) - min(periods.values())) / min(periods.values())
    ok = min(dips.values()) >= 5 and spread < 0.05 and minima[20] > minima[10]
    detail = (
        f"periods {', '.join(f'{p:.3f}' for p in periods.values())} (spread {spread:.1%}); "
        f"sub-1 troughs {list(dips.values())}; min sq_minus nbar=10 {minima[10]:.4f}, nbar=20 {minima[20]:.4f}"
    )
    assert report(8, "fig11 squeezing oscillations", ok, detail)


@pytest.mark.parametrize("key", ["fig2a-II", "fig6f-beta-half", "fig13c"])
def test_determinism(report, tmp_path, key):
    outputs = []
    for i in range(2):
        path = tmp_path / f"{i}.csv"
        assert cli.main(["run", "--preset", key, "--steps", "400", "--out", str(path)]) == 0
        outputs.append(path.read_bytes())
    same = outputs[0] == outputs[1]
    assert report(9, f"byte-identical CSV ({key})", same, f"{len(outputs[0])} bytes")

import math
import textwrap

import numpy as np
import pytest

from lambda_kerr.scenario import PRESETS, ConfigError, ScenarioConfig, load_config, preset, preset_ids


def write(tmp_path, text):
    path = tmp_path / "scenario.ini"
    path.write_text(textwrap.dedent(text))
    return path


def test_every_preset_builds_a_state():
    for key in preset_ids():
        cfg = preset(key)
        assert cfg.name == key
        state = cfg.initial_state()
        assert state.norm() == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize(
    "key, beta, chi_c, omega",
    [("fig3g-I", 0.0, 1.0, 0), ("fig5d", -0.5, 0.03, 0), ("fig7c", 0.5, 0.0, 200), ("fig10b", 0.5, 0.01, 200), ("fig13a", -0.5, 5e-5, 0)],
)
def test_preset_parameters(key, beta, chi_c, omega):
    p = preset(key).params
    assert (p.beta, p.chi_C, p.omega_rabi) == (beta, chi_c, omega)


def test_preset_fields():
    assert preset("fig2b-II").left.kind == "binomial"
    assert abs(preset("fig8b").left.alpha) ** 2 == pytest.approx(15)
    alpha = preset("fig11c").left.alpha
    assert abs(alpha) ** 2 == pytest.approx(20) and abs(alpha.real) < 1e-12
    assert preset("fig6c-beta-half").params.beta == 0.5
    assert preset("fig7").params == preset("fig7a").params


def test_preset_ids_sorted_naturally():
    ids = preset_ids()
    assert ids.index("fig9a") < ids.index("fig10a")
    assert set(ids) == set(PRESETS)
    with pytest.raises(ConfigError):
        preset("fig99")


def test_grid():
    cfg = ScenarioConfig(t_max=2.0, steps=5)
    np.testing.assert_array_equal(cfg.grid, [0, 0.5, 1.0, 1.5, 2.0])
    assert list(ScenarioConfig(t_max=0.0, steps=1).grid) == [0.0]


@pytest.mark.parametrize(
    "kw",
    [{"steps": 0}, {"t_max": -1.0}, {"t_max": math.inf}, {"frame": "lab"}, {"observers": ("x",)}, {"oracle_nmax": 9}],
)
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        ScenarioConfig(**kw)


def test_load_full_config(tmp_path):
    path = write(
        tmp_path,
        """
        [model]
        delta_L = 0.5
        chi_C = 1/100
        beta = -1/2
        omega_rabi = 2+1j

        [atom]
        a = 0.6
        b = 0.8j

        [left]
        kind = coherent
        mean_photons = 4
        phase = 1.5707963267948966

        [right]
        kind = binomial
        eta = 0.3
        M = 10

        [run]
        t_max = 5
        steps = 11
        observers = entropy, squeezing
        output = out.csv
        """,
    )
    cfg = load_config(path)
    assert cfg.params.chi_C == 0.01 and cfg.params.beta == -0.5 and cfg.params.omega_rabi == 2 + 1j
    assert cfg.atom.b == 0.8j
    assert cfg.left.alpha == pytest.approx(2j)
    assert (cfg.right.eta, cfg.right.M) == (0.3, 10)
    assert cfg.observers == ("entropy", "squeezing") and cfg.output == "out.csv"


def test_config_overrides_preset(tmp_path):
    cfg = load_config(write(tmp_path, "[run]\npreset = fig7c\nsteps = 7\nframe = interaction\n"))
    assert cfg.params.omega_rabi == 200 and cfg.steps == 7


@pytest.mark.parametrize(
    "text",
    [
        "[model]\nbeta = 0.3\n",
        "[model]\nlambda_L = -1\n",
        "[model]\nbogus = 1\n",
        "[extra]\nx = 1\n",
        "[left]\nkind = thermal\n",
        "[left]\nkind = explicit\n",
        "[atom]\na = 1\nb = 1\n",
        "[run]\npreset = nope\n",
        "[model]\nchi_C = abc\n",
        "not an ini file",
    ],
)
def test_bad_configs(tmp_path, text):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, text))


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")

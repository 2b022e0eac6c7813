"""Scenario configuration: figure presets and INI config files."""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .evolve import OBSERVER_COLUMNS
from .fock import DEFAULT_TAIL_EPS, FieldSpec, JointState, make_initial_state
from .model import AtomInit, ModelError, ModelParams, validate

DEFAULT_TMAX = 50.0
DEFAULT_STEPS = 2000


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one time series.

    ``steps`` is the number of grid points on [0, t_max]; a single step is
    the grid {0}.
    """

    params: ModelParams = field(default_factory=ModelParams)
    atom: AtomInit = field(default_factory=lambda: AtomInit.level(2))
    left: FieldSpec = field(default_factory=FieldSpec.vacuum)
    right: FieldSpec = field(default_factory=FieldSpec.vacuum)
    frame: str = "interaction"
    t_max: float = DEFAULT_TMAX
    steps: int = DEFAULT_STEPS
    observers: Optional[Tuple[str, ...]] = None
    tail_eps: float = DEFAULT_TAIL_EPS
    oracle_check: bool = False
    oracle_nmax: int = 3
    output: Optional[str] = None
    name: str = "custom"

    def __post_init__(self):
        if not (math.isfinite(self.t_max) and self.t_max >= 0):
            raise ConfigError(f"t_max must be finite and non-negative, got {self.t_max!r}")
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps!r}")
        if self.steps > 1 and self.t_max <= 0:
            raise ConfigError("t_max must be positive for a multi-point grid")
        if self.frame not in ("interaction", "full-phase"):
            raise ConfigError(f"frame must be 'interaction' or 'full', got {self.frame!r}")
        if self.frame == "full-phase" and self.params.absolute_freqs is None:
            raise ConfigError("the full frame requires [model] absolute_freqs = omega_L, omega_R, omega_2")
        if self.observers is not None:
            unknown = set(self.observers) - set(OBSERVER_COLUMNS)
            if unknown:
                raise ConfigError(f"unknown observers {sorted(unknown)}")
        if not 1 <= self.oracle_nmax <= 4:
            raise ConfigError("oracle_nmax must lie in 1..4")
        try:
            validate(self.params)
        except ModelError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps)

    def initial_state(self) -> JointState:
        left = replace(self.left, tail_eps=self.tail_eps)
        right = replace(self.right, tail_eps=self.tail_eps)
        return make_initial_state(self.atom, left, right, frame=self.frame)


# -- presets -------------------------------------------------------------------------


def _coherent(mean_photons: float, phase: float = 0.0) -> FieldSpec:
    return FieldSpec.coherent(math.sqrt(mean_photons) * complex(math.cos(phase), math.sin(phase)))


BINOMIAL = FieldSpec.binomial(0.5, 50)
# squeezing presets put the coherent amplitude on the imaginary axis so that
# c_- = p_R + p_L is the squeezed quadrature
SQUEEZE_PHASE = math.pi / 2


def _build_presets() -> Dict[str, ScenarioConfig]:
    table: Dict[str, ScenarioConfig] = {}

    def add(key, *, field_spec=None, atom=2, **params):
        fs = field_spec or _coherent(25)
        table[key] = ScenarioConfig(
            params=ModelParams(**params),
            atom=AtomInit.level(atom),
            left=fs,
            right=fs,
            name=key,
        )

    columns = {"I": _coherent(25), "II": BINOMIAL}
    for col, fs in columns.items():
        for letter, level in zip("abc", (1, 2, 3)):
            add(f"fig2{letter}-{col}", field_spec=fs, atom=level)
        for letter, chi in zip("abcdefg", (0, 0.001, 0.01, 0.05, 0.1, 0.5, 1)):
            add(f"fig3{letter}-{col}", field_spec=fs, chi_C=chi)
    for letter, chi in zip("abcdef", (0, 0.001, 0.01, 0.05, 0.1, 1)):
        add(f"fig4{letter}", beta=0.5, chi_C=chi)
    for letter, chi in zip("abcdefgh", (0, 0.002, 0.01, 0.03, 0.05, 0.1, 0.5, 1)):
        add(f"fig5{letter}", beta=-0.5, chi_C=chi)
    for letter, om in zip("abcdef", (0, 10, 20, 50, 100, 200)):
        add(f"fig6{letter}", field_spec=_coherent(20), omega_rabi=om)
        # beta = 1/2 companion of the drive scan; parameters otherwise identical
        add(f"fig6{letter}-beta-half", field_spec=_coherent(20), beta=0.5, omega_rabi=om)

    curves = "abc"
    for letter, om in zip(curves, (50, 100, 200)):
        add(f"fig7{letter}", field_spec=_coherent(20), beta=0.5, omega_rabi=om)
    for letter, n in zip(curves, (10, 15, 20)):
        add(f"fig8{letter}", field_spec=_coherent(n), beta=0.5, omega_rabi=200)
    for letter, d in zip(curves, (0, 10, 20)):
        add(f"fig9{letter}", field_spec=_coherent(20), beta=0.5, omega_rabi=200, delta_L=d, delta_R=d)
    for letter, chi in zip(curves, (0.001, 0.01, 0.1)):
        add(f"fig10{letter}", field_spec=_coherent(20), beta=0.5, omega_rabi=200, chi_C=chi)
    for letter, n in zip(curves, (10, 15, 20)):
        add(f"fig11{letter}", field_spec=_coherent(n, SQUEEZE_PHASE), beta=-0.5)
    for letter, d in zip(curves, (0, 1, 5)):
        add(f"fig12{letter}", field_spec=_coherent(15, SQUEEZE_PHASE), beta=-0.5, delta_L=d, delta_R=d)
    for letter, chi in zip(curves, (0.00005, 0.0002, 0.001)):
        add(f"fig13{letter}", field_spec=_coherent(15, SQUEEZE_PHASE), beta=-0.5, chi_C=chi)
    # bare figure ids select curve a
    for fig in range(7, 14):
        table[f"fig{fig}"] = replace(table[f"fig{fig}a"], name=f"fig{fig}")
    return table


PRESETS = _build_presets()


def preset_ids():
    return sorted(PRESETS, key=_natural_key)


def _natural_key(key: str):
    digits = "".join(ch for ch in key[3:] if ch.isdigit())
    return (int(digits or 0), key)


def preset(preset_id: str) -> ScenarioConfig:
    try:
        return PRESETS[preset_id]
    except KeyError:
        raise ConfigError(f"unknown preset {preset_id!r}; run 'presets' for the list") from None


# -- INI config files ------------------------------------------------------------------


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}") from None


def _real(text: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse real number {text!r}") from None


_MODEL_REAL = ("delta_L", "delta_R", "chi_L", "chi_R", "chi_C", "lambda_L", "lambda_R", "beta")


def _field_from_section(sec, base: FieldSpec) -> FieldSpec:
    kind = sec.get("kind", base.kind)
    if kind == "coherent":
        if "mean_photons" in sec:
            return _coherent(_real(sec["mean_photons"]), _real(sec.get("phase", "0")))
        return FieldSpec.coherent(_complex(sec["alpha"]) if "alpha" in sec else base.alpha)
    if kind == "binomial":
        return FieldSpec.binomial(_real(sec.get("eta", str(base.eta))), int(sec.get("M", base.M)))
    if kind == "explicit":
        if "amplitudes" not in sec:
            raise ConfigError("explicit field needs 'amplitudes'")
        return FieldSpec.explicit([_complex(x) for x in sec["amplitudes"].split(",")])
    raise ConfigError(f"unknown field kind {kind!r}")


def load_config(path) -> ScenarioConfig:
    """Read an INI scenario file.

    Sections: [model], [atom], [left], [right], [run]. ``[run] preset = id``
    starts from a preset and lets the other keys override it.
    """
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys are case-sensitive field names
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    known = {"model", "atom", "left", "right", "run"}
    extra = set(parser.sections()) - known
    if extra:
        raise ConfigError(f"unknown config sections {sorted(extra)}")
    run = parser["run"] if parser.has_section("run") else {}
    base = preset(run["preset"]) if "preset" in run else ScenarioConfig()

    try:
        params = base.params
        if parser.has_section("model"):
            sec = parser["model"]
            unknown = set(sec) - set(_MODEL_REAL) - {"omega_rabi", "absolute_freqs"}
            if unknown:
                raise ConfigError(f"unknown [model] keys {sorted(unknown)}")
            changes = {k: _real(sec[k]) for k in _MODEL_REAL if k in sec}
            if "omega_rabi" in sec:
                changes["omega_rabi"] = _complex(sec["omega_rabi"])
            if "absolute_freqs" in sec:
                changes["absolute_freqs"] = tuple(_real(x) for x in sec["absolute_freqs"].split(","))
            params = replace(params, **changes)

        atom = base.atom
        if parser.has_section("atom"):
            sec = parser["atom"]
            if "level" in sec:
                atom = AtomInit.level(int(sec["level"]))
            else:
                atom = AtomInit(*(_complex(sec.get(k, "0")) for k in "abc"))

        left = _field_from_section(parser["left"], base.left) if parser.has_section("left") else base.left
        right = _field_from_section(parser["right"], base.right) if parser.has_section("right") else base.right

        frame = run.get("frame", base.frame)
        frame = "full-phase" if frame == "full" else frame
        observers = base.observers
        if "observers" in run:
            observers = tuple(x.strip() for x in run["observers"].split(",") if x.strip())
        return ScenarioConfig(
            params=params,
            atom=atom,
            left=left,
            right=right,
            frame=frame,
            t_max=_real(run["t_max"]) if "t_max" in run else base.t_max,
            steps=int(run["steps"]) if "steps" in run else base.steps,
            observers=observers,
            tail_eps=_real(run["tail_eps"]) if "tail_eps" in run else base.tail_eps,
            oracle_check=run.get("oracle_check", str(base.oracle_check)).strip().lower() in ("1", "true", "yes", "on"),
            oracle_nmax=int(run.get("oracle_nmax", base.oracle_nmax)),
            output=run.get("output", base.output),
            name=str(run.get("name", base.name)),
        )
    except (ModelError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc

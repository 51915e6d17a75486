"""Plain-text run configuration.

One ``section.key = value`` per line; ``#`` starts a comment. Example::

    run.mode = quench
    lattice.L = 5
    model.ju = 0.7          # J/U before the quench
    quench.samples = 400

Couplings given in the file (``model.J``, ``model.U``, ``trap.*``) are in
Hz. Every key that the file does not set is resolved to its default and
recorded in :attr:`RunConfig.defaulted`.
"""
from __future__ import annotations

import difflib
import math
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import constants

from .errors import ConfigError
from .quench import DEFAULT_SAMPLES, DEFAULT_T_MAX, INITIAL_STATES, QuenchSpec, default_site
from .trap import BA138_MASS, DetectionParams, TrapParams, derive_couplings, radial_frequency

MODES = ("derive", "ground", "quench", "sweep")
OUTPUT_ENV = "PHONON_QUENCH_OUT"
DEFAULT_OUTPUT = "phonon_quench_out"


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"one of {', '.join(options)}")
        return text
    parse.expected = "one of " + "|".join(options)
    return parse


def _int(text):
    return int(text)


def _float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("a finite number")
    return value


def _bool(text):
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError("a boolean")


def _float_list(text):
    return [_float(part) for part in text.split(",") if part.strip()]


def _str(text):
    return text


_int.expected = "an integer"
_float.expected = "a number"
_bool.expected = "a boolean (true/false)"
_float_list.expected = "a comma-separated list of numbers"
_str.expected = "a string"

# key -> (parser, static default or None); None defaults are resolved later
SCHEMA: Dict[str, Tuple[Callable[[str], Any], Any]] = {
    "run.mode": (_choice(*MODES), None),
    "run.workers": (_int, None),
    "run.seed": (_int, 0),
    "run.output_dir": (_str, None),
    "lattice.L": (_int, 5),
    "lattice.N": (_int, None),
    "lattice.boundary": (_choice("open", "periodic"), "open"),
    "model.couplings": (_choice("explicit", "trap"), "explicit"),
    "model.ju": (_float, None),
    "model.J": (_float, None),
    "model.U": (_float, None),
    "model.omega_x": (_float, 0.0),
    "model.allow_any_sign": (_bool, False),
    "quench.site": (_int, None),
    "quench.measure_site": (_int, None),
    "quench.t_max": (_float, DEFAULT_T_MAX),
    "quench.samples": (_int, DEFAULT_SAMPLES),
    "quench.initial_state": (_choice(*INITIAL_STATES), "ground"),
    "quench.factor": (_float, -1.0),
    "sweep.ju_values": (_float_list, None),
    "sweep.ju_min": (_float, 0.01),
    "sweep.ju_max": (_float, 3.0),
    "sweep.points": (_int, 25),
    "trap.rf_drive_freq": (_float, 15e6),
    "trap.stability_q": (_float, 0.42),
    "trap.axial_freq": (_float, 180e3),
    "trap.ion_spacing": (_float, 20e-6),
    "trap.ion_mass_amu": (_float, BA138_MASS / constants.atomic_mass),
    "trap.F": (_float, None),
    "trap.F_ratio": (_float, None),
    "trap.wavelength": (_float, 300e-9),
    "trap.delta_parity": (_int, 0),
    "trap.omega_0": (_float, 75e3),
    "trap.hopping_hz": (_float, None),
    "detection.branching_f": (_float, 0.73),
    "detection.numerical_aperture": (_float, 0.4),
    "detection.lifetime": (_float, 7.8e-9),
    "detection.quantum_efficiency": (_float, 0.5),
    "detection.optics_loss": (_float, 0.1),
    "detection.solid_angle": (_float, None),
    "detection.gamma_convention": (_choice("inverse_lifetime", "two_pi_over_lifetime"),
                                   "inverse_lifetime"),
}


@dataclass
class RunConfig:
    mode: str
    values: Dict[str, Any]
    explicit: Dict[str, str]
    defaulted: List[str] = field(default_factory=list)

    def __getitem__(self, key):
        return self.values[key]

    @property
    def L(self) -> int:
        return self.values["lattice.L"]

    @property
    def N(self) -> int:
        return self.values["lattice.N"]

    def resolved_defaults(self) -> Dict[str, Any]:
        return {k: self.values[k] for k in self.defaulted}

    def echo_text(self) -> str:
        """The explicitly set keys as a configuration document."""
        lines = [f"{key} = {text}" for key, text in sorted(self.explicit.items())]
        return "\n".join(lines) + "\n"

    # -- model construction ----------------------------------------------

    def trap_params(self) -> TrapParams:
        v = self.values
        F = v["trap.F"]
        if v["trap.F_ratio"] is not None:
            F = v["trap.F_ratio"] * radial_frequency(v["trap.rf_drive_freq"], v["trap.stability_q"])
        return TrapParams(
            rf_drive_freq=v["trap.rf_drive_freq"],
            stability_q=v["trap.stability_q"],
            axial_freq=v["trap.axial_freq"],
            ion_spacing_d=v["trap.ion_spacing"],
            ion_mass=v["trap.ion_mass_amu"] * constants.atomic_mass,
            standing_wave_F=F,
            standing_wave_lambda=v["trap.wavelength"],
            delta_parity=v["trap.delta_parity"],
            quench_mod_freq=v["trap.omega_0"],
        )

    def detection_params(self) -> DetectionParams:
        v = self.values
        return DetectionParams(
            branching_f=v["detection.branching_f"],
            numerical_aperture=v["detection.numerical_aperture"],
            p_lifetime_tau=v["detection.lifetime"],
            quantum_eff_Qe=v["detection.quantum_efficiency"],
            optics_loss_Qo=v["detection.optics_loss"],
            solid_angle=v["detection.solid_angle"],
            gamma_convention=v["detection.gamma_convention"],
        )

    def couplings_hz(self) -> Tuple[Optional[float], Optional[float]]:
        """Resolve the couplings as ``(J, U)`` in Hz.

        When only ``model.ju`` is set there is no physical energy scale, so
        the result is ``(ju, None)`` and callers treat U as 1.
        """
        v = self.values
        if v["model.couplings"] == "trap":
            derived = derive_couplings(self.trap_params(), v["trap.hopping_hz"])
            return derived.J, derived.U
        J, U, ju = v["model.J"], v["model.U"], v["model.ju"]
        if J is not None and U is not None:
            return J, U
        if ju is not None and U is not None:
            return ju * U, U
        if ju is not None and J is not None:
            return J, J / ju
        if ju is not None:
            return ju, None
        return None, None

    def quench_spec(self) -> QuenchSpec:
        v = self.values
        J, U = self.couplings_hz()
        U_eff = 1.0 if U is None else 2 * math.pi * U
        J_eff = J if U is None else 2 * math.pi * J
        return QuenchSpec(
            L=self.L, N=self.N, J=J_eff, U_init=U_eff,
            quench_site=v["quench.site"], measure_site=v["quench.measure_site"],
            t_max=v["quench.t_max"], samples=v["quench.samples"],
            boundary=v["lattice.boundary"], omega_x=2 * math.pi * v["model.omega_x"],
            initial_state=v["quench.initial_state"], quench_factor=v["quench.factor"],
            allow_any_sign=v["model.allow_any_sign"],
        )

    def sweep_base_spec(self) -> QuenchSpec:
        """Quench spec whose ``J`` stays fixed while sweeps vary ``U_init``."""
        v = self.values
        J_hz, _ = self.couplings_hz() if v["model.couplings"] == "trap" else (v["model.J"], None)
        J = 1.0 if J_hz is None else 2 * math.pi * J_hz
        return QuenchSpec(
            L=self.L, N=self.N, J=J, U_init=J,
            quench_site=v["quench.site"], measure_site=v["quench.measure_site"],
            t_max=v["quench.t_max"], samples=v["quench.samples"],
            boundary=v["lattice.boundary"], omega_x=2 * math.pi * v["model.omega_x"],
            initial_state=v["quench.initial_state"], quench_factor=v["quench.factor"],
        )

    def ju_grid(self) -> List[float]:
        v = self.values
        if v["sweep.ju_values"] is not None:
            return list(v["sweep.ju_values"])
        return [float(x) for x in np.geomspace(v["sweep.ju_min"], v["sweep.ju_max"], v["sweep.points"])]


def _nearest(key: str) -> str:
    match = difflib.get_close_matches(key, SCHEMA.keys(), n=1, cutoff=0.0)
    return match[0] if match else ""


def _read_lines(text: str) -> Dict[str, str]:
    raw: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r} (did you mean {_nearest(key)!r}?)")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def parse_config(text: str, overrides: Optional[Dict[str, str]] = None) -> RunConfig:
    """Parse and fully resolve a configuration document.

    ``overrides`` (e.g. from CLI flags) are applied on top of the file; an
    override that contradicts a value in the file is an error.
    """
    raw = _read_lines(text)
    for key, value in (overrides or {}).items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r} (did you mean {_nearest(key)!r}?)")
        if key in raw and raw[key] != str(value):
            raise ConfigError(f"{key} is {raw[key]!r} in the config but {value!r} was requested")
        raw[key] = str(value)

    values: Dict[str, Any] = {}
    for key, text_value in raw.items():
        parser = SCHEMA[key][0]
        try:
            values[key] = parser(text_value)
        except ValueError:
            raise ConfigError(f"{key} = {text_value!r}: expected {parser.expected}") from None

    if "run.mode" not in values:
        raise ConfigError("missing required key 'run.mode' (one of " + ", ".join(MODES) + ")")

    defaulted = []

    def default(key, value):
        if key not in values:
            values[key] = value
            defaulted.append(key)

    for key, (_, static) in SCHEMA.items():
        if static is not None:
            default(key, static)
    default("run.workers", os.cpu_count() or 1)
    default("run.output_dir", os.environ.get(OUTPUT_ENV, DEFAULT_OUTPUT))
    default("lattice.N", values["lattice.L"])
    default("quench.site", default_site(values["lattice.L"]))
    default("quench.measure_site", values["quench.site"])
    for key in SCHEMA:
        default(key, None)

    cfg = RunConfig(values["run.mode"], values, {k: raw[k] for k in raw}, defaulted)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    v = cfg.values
    L, N = v["lattice.L"], v["lattice.N"]
    if L < 1:
        raise ConfigError(f"lattice.L = {L}: must be >= 1")
    if N < 0:
        raise ConfigError(f"lattice.N = {N}: must be >= 0")
    for key in ("quench.site", "quench.measure_site"):
        if not 1 <= v[key] <= L:
            raise ConfigError(f"{key} = {v[key]} out of range 1..{L}")
    if v["run.workers"] < 1:
        raise ConfigError("run.workers must be >= 1")
    if v["quench.samples"] < 1:
        raise ConfigError("quench.samples must be >= 1")
    if v["sweep.points"] < 1:
        raise ConfigError("sweep.points must be >= 1")
    if v["trap.F"] is not None and v["trap.F_ratio"] is not None:
        raise ConfigError("set at most one of trap.F and trap.F_ratio")
    grid = v["sweep.ju_values"]
    if grid is not None and (not grid or min(grid) <= 0):
        raise ConfigError("sweep.ju_values must be a non-empty list of positive ratios")
    if v["sweep.ju_min"] <= 0 or v["sweep.ju_max"] < v["sweep.ju_min"]:
        raise ConfigError("need 0 < sweep.ju_min <= sweep.ju_max")

    if cfg.mode == "quench" and v["model.couplings"] == "explicit":
        J, U = v["model.J"], v["model.U"]
        if v["model.ju"] is None and (J is None or U is None):
            raise ConfigError(
                "mode 'quench' needs the couplings: set model.ju (optionally with model.U "
                "or model.J), or both model.J and model.U, or model.couplings = trap"
            )
    if cfg.mode in ("ground", "sweep") and L < 2:
        raise ConfigError(f"mode {cfg.mode!r} needs lattice.L >= 2")

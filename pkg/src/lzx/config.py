"""Experiment configuration: flat dotted-key text files.

A config file is a sequence of ``key = value`` lines ('#' starts a comment).
All physical quantities carry unit-suffixed key names.  Recognized keys:

    table.path            operating-point table file (default: built-in table)
    points.phi_x          comma list of phi_x values to run (interpolated
                          from the table; default: all table nodes)
    points.count          alternatively, evenly pick this many table nodes
    grid.t_min_ns         log-spaced sweep-time grid (min >= 1 ns)
    grid.t_max_ns
    grid.count
    sweep.span_phi0       symmetric sweep: phi_init/final = -/+ span/2
    sweep.phi_init_phi0   explicit asymmetric endpoints (overrides span)
    sweep.phi_final_phi0
    methods               subset of coherent, schrodinger, ame, ptre
    noise.a_star          1/f amplitude at 1 Hz, Phi0^2/Hz
    noise.alpha           1/f exponent
    noise.b               ohmic amplitude, Phi0^2/Hz^2
    noise.gamma           ohmic exponent
    noise.temperature_K
    noise.f_l_GHz         AME low cutoff
    noise.f_h_GHz         AME high cutoff
    noise.f_low_mrt_Hz    MRT integral lower limit
    noise.f_high_mrt_GHz  MRT integral upper limit
    ptre.w_scale          comma list of MRT-width multipliers (default 1)
    ptre.t_scale          comma list of temperature multipliers (default 1)
    solver.rtol
    solver.atol
    run.out_dir
    run.parallel
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .device import (
    OperatingPoint,
    default_operating_table,
    interpolate_operating_point,
    load_operating_table,
)
from .errors import ConfigError
from .noise import NoiseModel
from .units import TWO_PI

METHODS = ("coherent", "schrodinger", "ame", "ptre")


@dataclass(frozen=True)
class ExperimentConfig:
    points: tuple
    t_grid: np.ndarray
    phi_init: float
    phi_final: float
    methods: tuple
    noise: NoiseModel = field(default_factory=NoiseModel)
    w_scales: tuple = (1.0,)
    t_scales: tuple = (1.0,)
    rtol: float = 1e-8
    atol: float = 1e-11
    out_dir: str = "out"
    parallel: int = 1

    def __post_init__(self):
        if len(self.points) == 0:
            raise ConfigError("points: at least one operating point required")
        t = np.asarray(self.t_grid, dtype=float)
        if t.size == 0:
            raise ConfigError("grid: empty sweep-time grid")
        if t[0] < 1.0:
            raise ConfigError(f"grid.t_min_ns: must be >= 1 ns, got {t[0]}")
        if np.any(np.diff(t) <= 0.0):
            raise ConfigError("grid: sweep times must be strictly increasing")
        if not self.methods:
            raise ConfigError("methods: at least one method required")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"methods: unknown method '{m}'")
        if not (self.phi_init < 0.0 < self.phi_final):
            raise ConfigError(
                "sweep: endpoints must straddle the symmetry point, got "
                f"({self.phi_init}, {self.phi_final})"
            )
        if self.parallel < 1:
            raise ConfigError(f"run.parallel: must be >= 1, got {self.parallel}")
        object.__setattr__(self, "t_grid", t)


def parse_flat_keys(text):
    """Parse 'key = value' lines into a dict, ignoring comments and blanks."""
    out = {}
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {i}: expected 'key = value', got '{raw.strip()}'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _get_float(mapping, key, default=None):
    if key not in mapping:
        if default is None:
            raise ConfigError(f"{key}: required key missing")
        return default
    try:
        return float(mapping[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: not a number: '{mapping[key]}'") from exc


def _get_int(mapping, key, default=None):
    val = _get_float(mapping, key, default)
    if val != int(val):
        raise ConfigError(f"{key}: expected an integer, got {val}")
    return int(val)


def _get_floats(mapping, key, default):
    if key not in mapping:
        return default
    try:
        return tuple(float(v) for v in mapping[key].split(","))
    except ValueError as exc:
        raise ConfigError(f"{key}: not a comma list of numbers") from exc


def _noise_from_mapping(mapping):
    try:
        return NoiseModel(
            a_star=_get_float(mapping, "noise.a_star", NoiseModel.a_star),
            alpha=_get_float(mapping, "noise.alpha", NoiseModel.alpha),
            b=_get_float(mapping, "noise.b", NoiseModel.b),
            gamma=_get_float(mapping, "noise.gamma", NoiseModel.gamma),
            temperature=_get_float(mapping, "noise.temperature_K", NoiseModel.temperature),
            omega_l=TWO_PI * _get_float(mapping, "noise.f_l_GHz", 0.010),
            omega_h=TWO_PI * _get_float(mapping, "noise.f_h_GHz", 10.0),
            omega_low_mrt=TWO_PI * 1e-9 * _get_float(mapping, "noise.f_low_mrt_Hz", 4.0),
            omega_high_mrt=TWO_PI * _get_float(mapping, "noise.f_high_mrt_GHz", 10.0),
        )
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}") from exc


def _points_from_mapping(mapping, base_dir):
    if "table.path" in mapping:
        path = Path(mapping["table.path"])
        if not path.is_absolute():
            path = base_dir / path
        try:
            table = load_operating_table(path)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"table.path: {exc}") from exc
    else:
        table = default_operating_table()
    if "points.phi_x" in mapping:
        try:
            targets = [float(v) for v in mapping["points.phi_x"].split(",")]
        except ValueError as exc:
            raise ConfigError("points.phi_x: not a comma list of numbers") from exc
        try:
            return tuple(interpolate_operating_point(table, x) for x in targets)
        except ValueError as exc:
            raise ConfigError(f"points.phi_x: {exc}") from exc
    if "points.count" in mapping:
        count = _get_int(mapping, "points.count")
        if not (1 <= count <= len(table)):
            raise ConfigError(
                f"points.count: must be in [1, {len(table)}], got {count}"
            )
        idx = np.unique(np.linspace(0, len(table) - 1, count).round().astype(int))
        return tuple(table[i] for i in idx)
    return tuple(table)


def config_from_mapping(mapping, base_dir=Path(".")):
    """Build an ExperimentConfig from a flat key-value mapping."""
    known_prefixes = (
        "table.", "points.", "grid.", "sweep.", "noise.", "ptre.", "solver.", "run.",
    )
    for key in mapping:
        if key != "methods" and not key.startswith(known_prefixes):
            raise ConfigError(f"{key}: unknown configuration key")

    points = _points_from_mapping(mapping, base_dir)
    t_min = _get_float(mapping, "grid.t_min_ns", 2.0)
    t_max = _get_float(mapping, "grid.t_max_ns", 5000.0)
    count = _get_int(mapping, "grid.count", 20)
    if t_min <= 0 or t_max <= t_min or count < 1:
        raise ConfigError(
            f"grid: need 0 < t_min < t_max and count >= 1, got "
            f"({t_min}, {t_max}, {count})"
        )
    t_grid = np.logspace(np.log10(t_min), np.log10(t_max), count)

    if "sweep.phi_init_phi0" in mapping or "sweep.phi_final_phi0" in mapping:
        phi_init = _get_float(mapping, "sweep.phi_init_phi0")
        phi_final = _get_float(mapping, "sweep.phi_final_phi0")
    else:
        span = _get_float(mapping, "sweep.span_phi0", 0.010)
        phi_init, phi_final = -span / 2.0, span / 2.0

    methods = tuple(
        m.strip() for m in mapping.get("methods", "coherent").split(",") if m.strip()
    )

    return ExperimentConfig(
        points=points,
        t_grid=t_grid,
        phi_init=phi_init,
        phi_final=phi_final,
        methods=methods,
        noise=_noise_from_mapping(mapping),
        w_scales=_get_floats(mapping, "ptre.w_scale", (1.0,)),
        t_scales=_get_floats(mapping, "ptre.t_scale", (1.0,)),
        rtol=_get_float(mapping, "solver.rtol", 1e-8),
        atol=_get_float(mapping, "solver.atol", 1e-11),
        out_dir=mapping.get("run.out_dir", "out"),
        parallel=_get_int(mapping, "run.parallel", 1),
    )


def load_config(path):
    """Read an ExperimentConfig from a flat dotted-key text file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return config_from_mapping(parse_flat_keys(text), base_dir=path.parent)

"""Experiment orchestration: method x operating-point x sweep-time grids.

Runs are independent and side-effect-free; records are gathered by key and
sorted, so the output is byte-identical for any parallelism degree.  Failed
runs become error rows (NaN probabilities) rather than aborting the grid.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ame import SolverOptions, evolve_ame
from .coherent import evolve_schrodinger, p_lz_schedule
from .device import SweepSchedule, dimensionless_time
from .errors import NumericsError
from .noise import MrtParams, mrt_width
from .ptre import PolaronSpectrum, evolve_ptre
from .trajectory import EvolutionResult
from .units import persistent_current_energy, thermal_energy

log = logging.getLogger("lzx")

CSV_COLUMNS = "method,phi_x,delta_GHz,ip_uA,t_lz_ns,tau,p_g,p_e,wall_time_s,solver_steps"


@dataclass(frozen=True)
class RunRecord:
    """One simulation outcome; the row type of all harness outputs."""

    method: str
    phi_x: float
    delta: float
    i_p: float
    t_lz: float
    tau: float
    p_g: float
    p_e: float
    wall_time: float
    solver_steps: int


def method_tag(method, w_scale=1.0, t_scale=1.0):
    """Record tag for a method variant, e.g. ptre_4w or ptre_t0.25."""
    if method != "ptre" or (w_scale == 1.0 and t_scale == 1.0):
        return method

    def fmt(x):
        return f"{x:g}"

    tag = method
    if w_scale != 1.0:
        tag += f"_{fmt(w_scale)}w"
    if t_scale != 1.0:
        tag += f"_t{fmt(t_scale)}"
    return tag


def scaled_mrt(noise_model, i_p, w_scale=1.0, t_scale=1.0):
    """MRT parameters for a (w_scale, t_scale) variant.

    W is the nominal-temperature quadrature value times w_scale; eps_p
    follows from the fluctuation-dissipation relation at the scaled
    temperature.
    """
    w = mrt_width(noise_model, i_p) * w_scale
    temp = noise_model.temperature * t_scale
    return MrtParams(w=w, epsilon_p=w**2 / (2.0 * thermal_energy(temp)))


def _run_single(task, config, spectra):
    method, w_scale, t_scale, point, t_lz = task
    schedule = SweepSchedule(
        point=point,
        phi_init=config.phi_init,
        phi_final=config.phi_final,
        t_lz=float(t_lz),
    )
    options = SolverOptions(rtol=config.rtol, atol=config.atol)
    if method == "coherent":
        p_e = p_lz_schedule(schedule)
        result = EvolutionResult(p_g=1.0 - p_e, p_e=p_e, steps=0)
    elif method == "schrodinger":
        result = evolve_schrodinger(schedule)
    elif method == "ame":
        result = evolve_ame(schedule, config.noise, options)
    else:
        mrt, spectrum = spectra[(point.phi_x, w_scale, t_scale)]
        result = evolve_ptre(
            schedule,
            mrt,
            config.noise.scaled(t_scale),
            options,
            spectrum=spectrum,
        )
    return result


def _record(task, config, result, wall):
    method, w_scale, t_scale, point, t_lz = task
    schedule = SweepSchedule(
        point=point,
        phi_init=config.phi_init,
        phi_final=config.phi_final,
        t_lz=float(t_lz),
    )
    return RunRecord(
        method=method_tag(method, w_scale, t_scale),
        phi_x=point.phi_x,
        delta=point.delta,
        i_p=point.i_p,
        t_lz=float(t_lz),
        tau=dimensionless_time(schedule),
        p_g=result.p_g,
        p_e=result.p_e,
        wall_time=wall,
        solver_steps=result.steps,
    )


def run_experiment(config):
    """Run every (method, operating point, t_lz, variant) in the config.

    Returns records sorted by (method, phi_x, t_lz).  Numeric failures are
    logged and recorded as rows with NaN probabilities.
    """
    tasks = []
    for method in config.methods:
        variants = (
            [(w, t) for w in config.w_scales for t in config.t_scales]
            if method == "ptre"
            else [(1.0, 1.0)]
        )
        for w_scale, t_scale in variants:
            for point in config.points:
                for t_lz in config.t_grid:
                    tasks.append((method, w_scale, t_scale, point, t_lz))

    spectra = {}
    if "ptre" in config.methods:
        eps_max = max(
            abs(persistent_current_energy(p.i_p, phi))
            for p in config.points
            for phi in (config.phi_init, config.phi_final)
        )
        for w_scale in config.w_scales:
            for t_scale in config.t_scales:
                for point in config.points:
                    mrt = scaled_mrt(config.noise, point.i_p, w_scale, t_scale)
                    spec = PolaronSpectrum.build(
                        mrt, config.noise.scaled(t_scale), point.i_p, eps_max
                    )
                    spectra[(point.phi_x, w_scale, t_scale)] = (mrt, spec)

    def worker(task):
        start = time.perf_counter()
        try:
            result = _run_single(task, config, spectra)
        except (NumericsError, ValueError) as exc:
            log.warning("run %s failed: %s", task[:3] + (task[3].phi_x, task[4]), exc)
            result = EvolutionResult(p_g=math.nan, p_e=math.nan, steps=0)
        wall = time.perf_counter() - start
        return _record(task, config, result, wall)

    if config.parallel > 1:
        with ThreadPoolExecutor(max_workers=config.parallel) as pool:
            records = list(pool.map(worker, tasks))
    else:
        records = [worker(t) for t in tasks]

    records.sort(key=lambda r: (r.method, r.phi_x, r.t_lz))
    return records


def emit_csv(records, path):
    """Write records as delimited text with full float precision."""
    if not records:
        raise ValueError("no records to write")
    rows = [CSV_COLUMNS]
    for r in records:
        rows.append(
            f"{r.method},{r.phi_x!r},{r.delta!r},{r.i_p!r},{r.t_lz!r},"
            f"{r.tau!r},{r.p_g!r},{r.p_e!r},{r.wall_time!r},{r.solver_steps}"
        )
    Path(path).write_text("\n".join(rows) + "\n")


def read_csv(path):
    """Parse a records file written by emit_csv."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != CSV_COLUMNS:
        raise ValueError(f"records file must start with header '{CSV_COLUMNS}'")
    records = []
    for ln in lines[1:]:
        f = ln.split(",")
        records.append(
            RunRecord(
                method=f[0],
                phi_x=float(f[1]),
                delta=float(f[2]),
                i_p=float(f[3]),
                t_lz=float(f[4]),
                tau=float(f[5]),
                p_g=float(f[6]),
                p_e=float(f[7]),
                wall_time=float(f[8]),
                solver_steps=int(f[9]),
            )
        )
    return records

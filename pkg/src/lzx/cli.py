"""Command-line interface.

Subcommands: coherent, evolve, mrt-params, psd, fit-gap, sweep.  Exit codes:
0 on success, 2 on configuration errors, 3 when every run in a sweep failed
numerically.  The LZX_LOG environment variable sets the log level.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .ame import SolverOptions, evolve_ame
from .coherent import evolve_schrodinger
from .config import ExperimentConfig, load_config
from .device import SweepSchedule, default_operating_table
from .errors import ConfigError, NumericsError
from .gapfit import fit_gap, load_series
from .harness import emit_csv, run_experiment, scaled_mrt
from .noise import (
    NoiseModel,
    mrt_params_fdt,
    psd_ame,
    psd_ohmic,
    psd_one_over_f,
    reorganization_energy_integral,
)
from .plotting import emit_plot
from .ptre import evolve_ptre
from .trajectory import write_trajectory_csv
from .units import TWO_PI, persistent_current_energy


def _default_config():
    table = default_operating_table()
    return ExperimentConfig(
        points=tuple(table),
        t_grid=np.logspace(np.log10(2.0), np.log10(5000.0), 20),
        phi_init=-0.005,
        phi_final=0.005,
        methods=("coherent",),
    )


def _load(args):
    if args.config:
        return load_config(args.config)
    return _default_config()


def _apply_overrides(config, args):
    updates = {}
    if getattr(args, "method", None):
        updates["methods"] = tuple(m.strip() for m in args.method.split(","))
    if getattr(args, "parallel", None):
        updates["parallel"] = args.parallel
    if getattr(args, "w_scale", None):
        updates["w_scales"] = tuple(args.w_scale)
    if getattr(args, "t_scale", None):
        updates["t_scales"] = tuple(args.t_scale)
    if getattr(args, "out", None):
        updates["out_dir"] = args.out
    return replace(config, **updates) if updates else config


def _out_dir(config):
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_and_emit(config):
    records = run_experiment(config)
    out = _out_dir(config)
    emit_csv(records, out / "records.csv")
    emit_plot(records, out / "pg_vs_tlz.svg", axis="t_lz")
    emit_plot(records, out / "pg_vs_tau.svg", axis="tau")
    print(f"wrote {len(records)} records to {out / 'records.csv'}")
    if all(math.isnan(r.p_g) for r in records):
        print("all runs failed numerically", file=sys.stderr)
        return 3
    return 0


def cmd_coherent(args):
    config = _apply_overrides(_load(args), args)
    config = replace(config, methods=("coherent",))
    return _run_and_emit(config)


def cmd_sweep(args):
    config = _apply_overrides(_load(args), args)
    return _run_and_emit(config)


def cmd_evolve(args):
    config = _apply_overrides(_load(args), args)
    point = config.points[min(args.point_index, len(config.points) - 1)]
    t_lz = args.t_lz if args.t_lz is not None else float(config.t_grid[-1])
    schedule = SweepSchedule(
        point=point, phi_init=config.phi_init, phi_final=config.phi_final, t_lz=t_lz
    )
    options = SolverOptions(rtol=config.rtol, atol=config.atol)
    samples = np.linspace(0.0, t_lz, args.samples)
    w_scale = args.w_scale[0] if args.w_scale else 1.0
    t_scale = args.t_scale[0] if args.t_scale else 1.0

    if args.method == "schrodinger":
        result = evolve_schrodinger(schedule, sample_times=samples)
    elif args.method == "ame":
        result = evolve_ame(schedule, config.noise, options, sample_times=samples)
    elif args.method == "ptre":
        mrt = scaled_mrt(config.noise, point.i_p, w_scale, t_scale)
        result = evolve_ptre(
            schedule,
            mrt,
            config.noise.scaled(t_scale),
            options,
            sample_times=samples,
        )
    else:
        raise ConfigError(f"evolve: unknown method '{args.method}'")

    out = _out_dir(config)
    path = out / f"trajectory_{args.method}.csv"
    write_trajectory_csv(result, path)
    print(
        f"method={args.method} phi_x={point.phi_x:g} t_lz={t_lz:g} ns  "
        f"p_g={result.p_g:.6f} p_e={result.p_e:.6f} steps={result.steps}"
    )
    print(f"wrote trajectory to {path}")
    return 0


def cmd_mrt_params(args):
    config = _load(args)
    rows = ["phi_x,delta_GHz,ip_uA,w_GHz,epsilon_p_fdt_GHz,epsilon_p_integral_GHz,fdt_deviation"]
    for point in config.points:
        params = mrt_params_fdt(config.noise, point.i_p)
        ep_int = reorganization_energy_integral(config.noise, point.i_p)
        dev = abs(ep_int - params.epsilon_p) / params.epsilon_p
        rows.append(
            f"{point.phi_x!r},{point.delta!r},{point.i_p!r},{params.w!r},"
            f"{params.epsilon_p!r},{ep_int!r},{dev!r}"
        )
    text = "\n".join(rows) + "\n"
    if args.out:
        out = _out_dir(config)
        (out / "mrt_params.csv").write_text(text)
        print(f"wrote {out / 'mrt_params.csv'}")
    else:
        print(text, end="")
    return 0


def cmd_psd(args):
    config = _load(args)
    noise = config.noise
    f = np.logspace(math.log10(args.f_min_ghz), math.log10(args.f_max_ghz), args.count)
    rows = ["f_GHz,s_1f,s_1f_neg,s_ohmic,s_ame,s_ame_neg"]
    for fi in f:
        w = TWO_PI * fi
        rows.append(
            f"{fi!r},{psd_one_over_f(noise, w)!r},{psd_one_over_f(noise, -w)!r},"
            f"{psd_ohmic(noise, w)!r},{psd_ame(noise, w)!r},{psd_ame(noise, -w)!r}"
        )
    text = "\n".join(rows) + "\n"
    if args.out:
        out = _out_dir(config)
        (out / "psd.csv").write_text(text)
        print(f"wrote {out / 'psd.csv'}")
    else:
        print(text, end="")
    return 0


def cmd_fit_gap(args):
    series = load_series(args.input)
    if args.i_p is not None and args.flux_span is not None:
        i_p, span = args.i_p, args.flux_span
    else:
        config = _load(args)
        point = config.points[0]
        i_p = args.i_p if args.i_p is not None else point.i_p
        span = (
            args.flux_span
            if args.flux_span is not None
            else config.phi_final - config.phi_init
        )
    result = fit_gap(series, i_p, span)
    header = "kappa_per_ns,kappa_stderr_per_ns,window_max_ns,mse,delta_lz_GHz"
    row = (
        f"{result.kappa!r},{result.kappa_stderr!r},{result.window_max!r},"
        f"{result.mse!r},{result.delta_lz!r}"
    )
    if args.out:
        Path(args.out).write_text(header + "\n" + row + "\n")
        print(f"wrote {args.out}")
    else:
        print(header)
        print(row)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lzx",
        description="Dissipative Landau-Zener sweep simulator for flux qubits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("--config", help="flat dotted-key config file")
        if out:
            p.add_argument("--out", help="output directory (overrides run.out_dir)")

    p = sub.add_parser("coherent", help="analytic LZ probabilities over the grid")
    common(p)
    p.add_argument("--parallel", type=int)

    p = sub.add_parser("sweep", help="full experiment grid with CSV + SVG output")
    common(p)
    p.add_argument("--method", help="comma list overriding config methods")
    p.add_argument("--parallel", type=int)
    p.add_argument("--w-scale", type=float, action="append")
    p.add_argument("--t-scale", type=float, action="append")

    p = sub.add_parser("evolve", help="single trajectory with dump")
    common(p)
    p.add_argument("--method", default="ame", choices=("schrodinger", "ame", "ptre"))
    p.add_argument("--point-index", type=int, default=0)
    p.add_argument("--t-lz", type=float, help="sweep time in ns (default: grid max)")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--w-scale", type=float, action="append")
    p.add_argument("--t-scale", type=float, action="append")

    p = sub.add_parser("mrt-params", help="MRT width and reorganization energy")
    common(p, out=False)
    p.add_argument("--out", action="store_true", help="write CSV to the out dir")

    p = sub.add_parser("psd", help="dump noise PSD tables")
    common(p, out=False)
    p.add_argument("--out", action="store_true", help="write CSV to the out dir")
    p.add_argument("--f-min-ghz", type=float, default=1e-3)
    p.add_argument("--f-max-ghz", type=float, default=20.0)
    p.add_argument("--count", type=int, default=200)

    p = sub.add_parser("fit-gap", help="fit a decay series and convert to a gap")
    p.add_argument("--input", required=True, help="CSV with columns t_lz_ns,p_e")
    p.add_argument("--config", help="config supplying i_p and flux span defaults")
    p.add_argument("--i-p", type=float, help="persistent current in uA")
    p.add_argument("--flux-span", type=float, help="total flux span in Phi0")
    p.add_argument("--out", help="output CSV path")

    return parser


COMMANDS = {
    "coherent": cmd_coherent,
    "sweep": cmd_sweep,
    "evolve": cmd_evolve,
    "mrt-params": cmd_mrt_params,
    "psd": cmd_psd,
    "fit-gap": cmd_fit_gap,
}


def main(argv=None):
    logging.basicConfig(level=os.environ.get("LZX_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

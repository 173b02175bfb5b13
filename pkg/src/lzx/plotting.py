"""SVG report figures for sweep experiments."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

AXES = {"t_lz": ("t_lz", r"$T_\mathrm{LZ}$ (ns)"), "tau": ("tau", r"$\tau$")}


def emit_plot(records, path, axis="t_lz"):
    """Plot P_g versus sweep time or tau, one series per (method, phi_x).

    The coherent-limit curve 1 - exp(-pi*tau/2) is drawn alongside.  Every
    series carries an XML gid 'series-<method>-phix-<value>' in the SVG.
    """
    if not records:
        raise ValueError("no records to plot")
    if axis not in AXES:
        raise ValueError(f"axis must be one of {sorted(AXES)}, got '{axis}'")
    attr, xlabel = AXES[axis]

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    series = {}
    for r in records:
        series.setdefault((r.method, r.phi_x), []).append(r)

    for (method, phi_x), rows in sorted(series.items()):
        rows.sort(key=lambda r: r.t_lz)
        x = np.array([getattr(r, attr) for r in rows])
        y = np.array([r.p_g for r in rows])
        keep = np.isfinite(y)
        if not keep.any():
            continue
        (line,) = ax.plot(
            x[keep], y[keep], marker="o", ms=3.0, lw=1.0,
            label=f"{method} $\\Phi_x$={phi_x:.4g}",
        )
        line.set_gid(f"series-{method}-phix-{phi_x:g}")

    taus = [r.tau for r in records if math.isfinite(r.tau) and r.tau > 0.0]
    tau_grid = np.logspace(
        math.log10(min(taus)), math.log10(max(taus)), 200
    )
    pg_coh = 1.0 - np.exp(-0.5 * math.pi * tau_grid)
    if axis == "tau":
        (line,) = ax.plot(tau_grid, pg_coh, "k--", lw=1.2, label="coherent limit")
        line.set_gid("series-coherent-limit")
    else:
        # tau is proportional to t_lz at fixed operating point and span
        for phi_x in sorted({r.phi_x for r in records}):
            rows = sorted(
                (r for r in records if r.phi_x == phi_x), key=lambda r: r.t_lz
            )
            x = np.array([r.t_lz for r in rows])
            y = 1.0 - np.exp(-0.5 * math.pi * np.array([r.tau for r in rows]))
            (line,) = ax.plot(x, y, "k--", lw=0.8)
            line.set_gid(f"series-coherent-limit-phix-{phi_x:g}")

    ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(r"$P_g$")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=7, ncol=2, frameon=False)
    fig.tight_layout()
    fig.savefig(Path(path), format="svg")
    plt.close(fig)

"""Two-level flux-qubit model at a flux operating point and the sweep schedule.

The qubit Hamiltonian in the persistent-current basis is

    H = -(eps(t)/2) sigma_z - (delta/2) sigma_x

with the detuning eps(t) = 2 * i_p * current_to_freq * phi(t) swept linearly
between two flux offsets measured from the symmetry point.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .units import CONSTANTS, TWO_PI, persistent_current_energy


@dataclass(frozen=True)
class OperatingPoint:
    """One (phi_x, delta, i_p) bias point of the tunable qubit.

    phi_x is in Phi0 units, delta (the minimum gap) in GHz, i_p in uA.
    """

    phi_x: float
    delta: float
    i_p: float

    def __post_init__(self):
        if self.delta <= 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.i_p <= 0.0:
            raise ValueError(f"i_p must be positive, got {self.i_p}")


@dataclass(frozen=True)
class SweepSchedule:
    """Linear flux ramp through the anticrossing.

    phi_init and phi_final are offsets from the symmetry point in Phi0 units
    and must straddle it; t_lz is the total sweep duration in ns.  The sweep
    must start and end at |eps| >= 10*delta for the Landau-Zener asymptotics
    to apply; below 50*delta a warning is emitted.
    """

    point: OperatingPoint
    phi_init: float
    phi_final: float
    t_lz: float

    def __post_init__(self):
        if not (self.phi_init < 0.0 < self.phi_final):
            raise ValueError(
                "sweep must cross the symmetry point: "
                f"phi_init={self.phi_init}, phi_final={self.phi_final}"
            )
        if self.t_lz <= 0.0:
            raise ValueError(f"t_lz must be positive, got {self.t_lz}")
        eps_i = abs(persistent_current_energy(self.point.i_p, self.phi_init))
        eps_f = abs(persistent_current_energy(self.point.i_p, self.phi_final))
        guard = min(eps_i, eps_f) / self.point.delta
        if guard < 10.0:
            raise ValueError(
                f"sweep endpoints too close to the anticrossing: |eps| = "
                f"{guard:.1f}*delta < 10*delta"
            )
        if guard < 50.0:
            warnings.warn(
                f"sweep endpoint at |eps| = {guard:.1f}*delta; LZ asymptotics "
                "are marginal below 50*delta",
                stacklevel=2,
            )


def epsilon_at(schedule, t):
    """Detuning eps(t)/h in GHz at time t in [0, t_lz]."""
    if not (0.0 <= t <= schedule.t_lz):
        raise ValueError(f"t={t} outside sweep interval [0, {schedule.t_lz}]")
    phi = schedule.phi_init + (schedule.phi_final - schedule.phi_init) * (
        t / schedule.t_lz
    )
    return persistent_current_energy(schedule.point.i_p, phi)


def hamiltonian_at(schedule, t):
    """Instantaneous 2x2 Hamiltonian (GHz) in the persistent-current basis."""
    eps = epsilon_at(schedule, t)
    delta = schedule.point.delta
    return np.array(
        [[-eps / 2.0, -delta / 2.0], [-delta / 2.0, eps / 2.0]], dtype=complex
    )


def gap_at(schedule, t):
    """Instantaneous energy gap sqrt(eps^2 + delta^2) in GHz."""
    eps = epsilon_at(schedule, t)
    return math.hypot(eps, schedule.point.delta)


def sweep_velocity(schedule):
    """Sweep velocity v = d(eps)/dt in GHz/ns (positive for valid sweeps)."""
    span = schedule.phi_final - schedule.phi_init
    return persistent_current_energy(schedule.point.i_p, span) / schedule.t_lz


def dimensionless_time(schedule):
    """tau = delta^2/(hbar*v) = 2*pi*delta^2/v with delta in GHz, v in GHz/ns."""
    return TWO_PI * schedule.point.delta**2 / sweep_velocity(schedule)


def interpolate_operating_point(table, phi_x):
    """Interpolate (delta, i_p) at phi_x from a table of operating points.

    delta is interpolated log-linearly in phi_x (it varies nearly
    exponentially with the x bias), i_p linearly.  The table must be sorted
    by phi_x and contain at least two entries; requests outside the table
    range raise ValueError.
    """
    if len(table) < 2:
        raise ValueError("operating-point table needs at least 2 entries")
    xs = [p.phi_x for p in table]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("operating-point table must be sorted by phi_x ascending")
    if not (xs[0] <= phi_x <= xs[-1]):
        raise ValueError(
            f"phi_x={phi_x} outside table range [{xs[0]}, {xs[-1]}]"
        )
    log_delta = np.interp(phi_x, xs, [math.log(p.delta) for p in table])
    i_p = np.interp(phi_x, xs, [p.i_p for p in table])
    return OperatingPoint(phi_x=phi_x, delta=math.exp(log_delta), i_p=float(i_p))


def default_operating_table(n=8):
    """Synthetic operating-point table spanning the device's tuning range.

    delta/h is log-spaced over [0.012, 0.120] GHz and i_p linearly spaced
    over [0.104, 0.129] uA, with i_p increasing as delta (and phi_x)
    decreases.  The phi_x node placement is nominal.
    """
    phi_x = np.linspace(0.18, 0.25, n)
    delta = np.logspace(math.log10(0.012), math.log10(0.120), n)
    i_p = np.linspace(0.129, 0.104, n)
    return [
        OperatingPoint(phi_x=float(x), delta=float(d), i_p=float(i))
        for x, d, i in zip(phi_x, delta, i_p)
    ]


TABLE_HEADER = "phi_x,delta_GHz,ip_uA"


def load_operating_table(path):
    """Read an operating-point table from a delimited text file."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0].strip() != TABLE_HEADER:
        raise ValueError(
            f"operating-point table must start with header '{TABLE_HEADER}'"
        )
    table = []
    for ln in lines[1:]:
        if not ln.strip():
            continue
        x, d, i = (float(v) for v in ln.split(","))
        table.append(OperatingPoint(phi_x=x, delta=d, i_p=i))
    return table


def save_operating_table(table, path):
    """Write an operating-point table as delimited text."""
    rows = [TABLE_HEADER]
    rows += [f"{p.phi_x!r},{p.delta!r},{p.i_p!r}" for p in table]
    Path(path).write_text("\n".join(rows) + "\n")

"""Closed-system reference: the analytic LZ probability and a Schrodinger
propagator used as the coherent-limit oracle."""

from __future__ import annotations

import math

import numpy as np

from . import _integrate
from .ame import eigenframe
from .device import dimensionless_time, epsilon_at, gap_at, hamiltonian_at
from .errors import NumericsError
from .trajectory import EvolutionResult

RTOL_DEFAULT = 1e-10
ATOL_DEFAULT = 1e-12


def p_lz(delta, v):
    """Diabatic-following probability exp(-pi*delta^2/(2*hbar*v)).

    delta in GHz, v in GHz/ns; equals exp(-pi*tau/2) for the dimensionless
    sweep time tau.
    """
    if v <= 0.0:
        raise ValueError(f"sweep velocity must be positive, got {v}")
    if delta < 0.0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    return math.exp(-(math.pi * delta) ** 2 / v)


def p_lz_schedule(schedule):
    """Analytic LZ probability for a sweep schedule: exp(-pi*tau/2)."""
    return math.exp(-0.5 * math.pi * dimensionless_time(schedule))


def propagate_state(schedule, psi, t_from, t_to, rtol=RTOL_DEFAULT, atol=ATOL_DEFAULT):
    """Unitary propagation of a pure state between two sweep times.

    Works in either direction (t_to < t_from integrates the time-reversed
    dynamics).  Steps are exactly unitary, so the norm is conserved to
    roundoff.  Returns (psi, accepted_steps).
    """
    e0 = epsilon_at(schedule, 0.0)
    erate = (epsilon_at(schedule, schedule.t_lz) - e0) / schedule.t_lz
    f_max = max(gap_at(schedule, 0.0), gap_at(schedule, schedule.t_lz))
    max_step = 1.0 / (20.0 * f_max)
    psi = np.asarray(psi, dtype=np.complex128)
    if t_to >= t_from:
        out, status, steps = _integrate.magnus_schrodinger(
            psi,
            t_from,
            t_to,
            e0,
            erate,
            schedule.point.delta,
            rtol,
            atol,
            max_step,
            _integrate.MAX_STEPS_DEFAULT,
        )
    else:
        # time reversal: s = -t turns i dpsi/dt = H(t) psi into forward
        # propagation in s under -H(-s)
        out, status, steps = _integrate.magnus_schrodinger(
            psi,
            -t_from,
            -t_to,
            -e0,
            erate,
            -schedule.point.delta,
            rtol,
            atol,
            max_step,
            _integrate.MAX_STEPS_DEFAULT,
        )
    if status != 0:
        raise NumericsError(f"unitary propagation failed with status {status}")
    return out, steps


def evolve_schrodinger(
    schedule, rtol=RTOL_DEFAULT, atol=ATOL_DEFAULT, sample_times=None
):
    """Sweep the instantaneous ground state through the anticrossing.

    Returns final populations in the instantaneous eigenbasis at t_lz; the
    excited population is the diabatic-following probability that the LZ
    formula predicts.
    """
    frame0 = eigenframe(hamiltonian_at(schedule, 0.0))
    psi = frame0.ground.astype(np.complex128)
    steps = 0

    if sample_times is None:
        grid = np.array([0.0, schedule.t_lz])
    else:
        inner = [t for t in sample_times if 0.0 < t < schedule.t_lz]
        grid = np.array([0.0, *inner, schedule.t_lz])

    times = []
    pg_t = []
    pe_t = []
    coh_t = []

    def record(t, psi_t):
        frame = eigenframe(hamiltonian_at(schedule, t))
        a_g = complex(frame.ground.conj() @ psi_t)
        a_e = complex(frame.excited.conj() @ psi_t)
        times.append(t)
        pg_t.append(abs(a_g) ** 2)
        pe_t.append(abs(a_e) ** 2)
        coh_t.append(a_g * a_e.conjugate())

    record(0.0, psi)
    for t0, t1 in zip(grid[:-1], grid[1:]):
        psi, n = propagate_state(schedule, psi, t0, t1, rtol=rtol, atol=atol)
        steps += n
        record(t1, psi)

    if sample_times is None:
        return EvolutionResult(p_g=pg_t[-1], p_e=pe_t[-1], steps=steps)
    return EvolutionResult(
        p_g=pg_t[-1],
        p_e=pe_t[-1],
        steps=steps,
        times=np.array(times),
        p_g_t=np.array(pg_t),
        p_e_t=np.array(pe_t),
        coh_t=np.array(coh_t),
    )

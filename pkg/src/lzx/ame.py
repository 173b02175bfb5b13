"""Adiabatic master equation: weak-coupling open-system propagator.

The generator is the double-sided Lindblad form without Lamb shift,

    drho/dt = -i[H(t), rho] + sum_w S(w) (L_w rho L_w+ - {L_w+ L_w, rho}/2)

with time-dependent Lindblad operators built from the instantaneous
eigenstates of H(t) and the cutoff-regularized PSD evaluated at the
instantaneous Bohr frequencies {0, +gap, -gap}.  Integration runs in the
fixed persistent-current basis with the generator rebuilt from the
closed-form 2x2 eigenframe at every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _integrate
from .device import epsilon_at, gap_at, hamiltonian_at, sweep_velocity
from .errors import NumericsError
from .noise import coupling_rate_factor, psd_ame
from .trajectory import EvolutionResult
from .units import TWO_PI


@dataclass(frozen=True)
class SolverOptions:
    """Step-control settings for the master-equation integrators.

    max_step_periods caps the step at that fraction of the fastest
    oscillation period, 1/(max_step_periods * f_max); coarse_tail switches
    the AME to the eigenbasis-diagonal rate equation once the sweep is well
    past the crossing (off by default, populations only).
    """

    rtol: float = 1e-8
    atol: float = 1e-11
    max_step_periods: float = 20.0
    max_steps: int = _integrate.MAX_STEPS_DEFAULT
    coarse_tail: bool = False
    coarse_tail_guard: float = 30.0


@dataclass(frozen=True)
class EigenFrame:
    """Instantaneous eigendecomposition with a fixed gauge.

    Eigenvectors are columns in the persistent-current basis; the gauge
    makes each eigenvector's first nonzero component real and positive,
    which keeps the frame continuous along a sweep.
    """

    e_g: float
    e_e: float
    ground: np.ndarray
    excited: np.ndarray

    @property
    def gap(self):
        return self.e_e - self.e_g

    @property
    def bohr(self):
        return (0.0, self.gap, -self.gap)


def _gauge(v):
    for comp in v:
        if comp != 0.0:
            phase = comp / abs(comp)
            return v / phase
    raise ValueError("zero eigenvector")


def eigenframe(h):
    """Closed-form eigendecomposition of a Hermitian 2x2 matrix."""
    a = h[0, 0].real
    b = h[1, 1].real
    c = h[0, 1]
    mean = 0.5 * (a + b)
    half = math.hypot(0.5 * (a - b), abs(c))
    e_g = mean - half
    e_e = mean + half
    if c == 0.0:
        ground = np.array([1.0, 0.0], dtype=complex)
        excited = np.array([0.0, 1.0], dtype=complex)
        if a > b:
            ground, excited = excited, ground
    else:
        ground = np.array([c, e_g - a], dtype=complex)
        excited = np.array([c, e_e - a], dtype=complex)
        ground = _gauge(ground / np.linalg.norm(ground))
        excited = _gauge(excited / np.linalg.norm(excited))
    return EigenFrame(e_g=e_g, e_e=e_e, ground=ground, excited=excited)


@dataclass(frozen=True)
class LindbladSet:
    """Coupling operator split by Bohr frequency, in the eigenbasis."""

    ops: dict

    def __getitem__(self, omega):
        return self.ops[omega]


def lindblad_set(point, frame):
    """Operators <a| I_p sigma_z |b> |a><b| grouped by Bohr frequency.

    Matrices are represented in the (ground, excited) eigenbasis; their sum
    reconstructs I_p sigma_z there.
    """
    sz = np.diag([1.0, -1.0]).astype(complex)
    basis = np.column_stack([frame.ground, frame.excited])
    sz_eig = basis.conj().T @ sz @ basis
    ip = point.i_p
    l_zero = ip * np.diag(np.diag(sz_eig))
    l_down = np.zeros((2, 2), dtype=complex)
    l_down[0, 1] = ip * sz_eig[0, 1]
    l_up = l_down.conj().T
    return LindbladSet(ops={0.0: l_zero, frame.gap: l_down, -frame.gap: l_up})


def ame_rhs(rho, t, schedule, noise_model):
    """Time-derivative of rho under the AME generator (reference path).

    Built from the eigenframe and LindbladSet objects by direct matrix
    arithmetic; the jitted kernel used by evolve_ame is checked against
    this.  rho and the result are 2x2 complex arrays in the
    persistent-current basis.
    """
    h = hamiltonian_at(schedule, t)
    frame = eigenframe(h)
    lset = lindblad_set(schedule.point, frame)
    basis = np.column_stack([frame.ground, frame.excited])
    kfac = coupling_rate_factor(1.0)
    drho = -1j * TWO_PI * (h @ rho - rho @ h)
    for omega, l_eig in lset.ops.items():
        rate = kfac * psd_ame(noise_model, TWO_PI * omega)
        l_pc = basis @ l_eig @ basis.conj().T
        ldag_l = l_pc.conj().T @ l_pc
        drho += rate * (
            l_pc @ rho @ l_pc.conj().T - 0.5 * (ldag_l @ rho + rho @ ldag_l)
        )
    return drho


def _noise_params(schedule, noise_model):
    si = 1e9
    return np.array(
        [
            epsilon_at(schedule, 0.0),
            sweep_velocity(schedule),
            schedule.point.delta,
            coupling_rate_factor(schedule.point.i_p),
            noise_model.a_amp,
            noise_model.alpha,
            noise_model.b,
            noise_model.gamma,
            noise_model.hbar_beta,
            noise_model.omega_l * si,
            noise_model.omega_h * si,
        ]
    )


_EMPTY_GX = np.empty(0, dtype=np.float64)
_EMPTY_GC = np.empty((4, 0), dtype=np.float64)


def _max_step(schedule, options):
    f_max = max(gap_at(schedule, 0.0), gap_at(schedule, schedule.t_lz))
    return 1.0 / (options.max_step_periods * f_max)


def _readout(rho, frame, clip=1e-7):
    """Eigenbasis populations from a PC-basis density matrix.

    Small negative populations (integrator tolerance noise) are clipped at
    readout only.
    """
    p_g = float(np.real(frame.ground.conj() @ rho @ frame.ground))
    p_e = float(np.real(frame.excited.conj() @ rho @ frame.excited))
    if p_g < -1e-5 or p_e < -1e-5:
        raise NumericsError(
            f"density matrix lost positivity: p_g={p_g}, p_e={p_e}"
        )
    p_g = min(max(p_g, 0.0), 1.0)
    p_e = min(max(p_e, 0.0), 1.0)
    coh = complex(frame.ground.conj() @ rho @ frame.excited)
    return p_g, p_e, coh


def _rho_from_vec(y):
    return np.array([[y[0], y[1]], [y[2], y[3]]])


def _evolve_rho(rhs, y0, t_grid, fp, gx, gc, options, max_step):
    """March the flattened density matrix through the sample grid."""
    ys = [y0]
    steps = 0
    y = y0
    for t0, t1 in zip(t_grid[:-1], t_grid[1:]):
        y, status, n_acc = _integrate.dp45(
            rhs,
            y,
            t0,
            t1,
            fp,
            gx,
            gc,
            options.rtol,
            options.atol,
            max_step,
            options.max_steps,
        )
        steps += n_acc
        if status != 0:
            raise NumericsError(
                f"integrator failed with status {status} at t in "
                f"[{t0}, {t1}] ns after {steps} accepted steps"
            )
        ys.append(y)
    return ys, steps


def evolve_ame(schedule, noise_model, options=None, sample_times=None):
    """Propagate the AME over the sweep from the instantaneous ground state.

    Returns an EvolutionResult with final populations in the instantaneous
    eigenbasis; when sample_times is given the trajectory is recorded at
    those instants (endpoints are added automatically).
    """
    options = options or SolverOptions()
    frame0 = eigenframe(hamiltonian_at(schedule, 0.0))
    rho0 = np.outer(frame0.ground, frame0.ground.conj())
    y0 = rho0.reshape(-1).astype(np.complex128)
    fp = _noise_params(schedule, noise_model)
    max_step = _max_step(schedule, options)

    t_end = schedule.t_lz
    t_switch = t_end
    if options.coarse_tail:
        eps0 = epsilon_at(schedule, 0.0)
        v = sweep_velocity(schedule)
        t_guard = (options.coarse_tail_guard * schedule.point.delta - eps0) / v
        if t_guard < t_end:
            t_switch = max(t_guard, 0.0)

    if sample_times is None:
        grid = np.array([0.0, t_switch])
    else:
        inner = [t for t in sample_times if 0.0 < t < t_switch]
        grid = np.array([0.0, *inner, t_switch])

    ys, steps = _evolve_rho(
        _integrate.ame_rhs_nb, y0, grid, fp, _EMPTY_GX, _EMPTY_GC, options, max_step
    )

    if t_switch < t_end:
        # populations-only rate equation for the far tail
        frame_sw = eigenframe(hamiltonian_at(schedule, t_switch))
        p_g, p_e, _ = _readout(_rho_from_vec(ys[-1]), frame_sw)
        p = np.array([p_g, p_e], dtype=np.complex128)
        p, status, n_acc = _integrate.dp45(
            _integrate.ame_rate_rhs_nb,
            p,
            t_switch,
            t_end,
            fp,
            _EMPTY_GX,
            _EMPTY_GC,
            options.rtol,
            options.atol,
            np.inf,
            options.max_steps,
        )
        steps += n_acc
        if status != 0:
            raise NumericsError(f"rate-equation tail failed with status {status}")
        p_g = float(p[0].real)
        p_e = float(p[1].real)
        coh_final = 0.0 + 0.0j
    else:
        frame1 = eigenframe(hamiltonian_at(schedule, t_end))
        p_g, p_e, coh_final = _readout(_rho_from_vec(ys[-1]), frame1)

    if sample_times is None:
        return EvolutionResult(p_g=p_g, p_e=p_e, steps=steps)

    times = []
    pg_t = []
    pe_t = []
    coh_t = []
    for t, y in zip(grid, ys):
        frame = eigenframe(hamiltonian_at(schedule, t))
        g, e, coh = _readout(_rho_from_vec(y), frame)
        times.append(t)
        pg_t.append(g)
        pe_t.append(e)
        coh_t.append(coh)
    if t_switch < t_end:
        times.append(t_end)
        pg_t.append(p_g)
        pe_t.append(p_e)
        coh_t.append(coh_final)
    return EvolutionResult(
        p_g=p_g,
        p_e=p_e,
        steps=steps,
        times=np.array(times),
        p_g_t=np.array(pg_t),
        p_e_t=np.array(pe_t),
        coh_t=np.array(coh_t),
    )


def evolve_static(delta, epsilon, noise_model, i_p, t_final, options=None):
    """AME evolution under a frozen Hamiltonian (diagnostic for thermalization).

    Starts from the ground state of the static H and returns the final
    eigenbasis populations after t_final ns.
    """
    options = options or SolverOptions()
    h = np.array(
        [[-epsilon / 2.0, -delta / 2.0], [-delta / 2.0, epsilon / 2.0]], dtype=complex
    )
    frame = eigenframe(h)
    rho0 = np.outer(frame.ground, frame.ground.conj())
    si = 1e9
    fp = np.array(
        [
            epsilon,
            0.0,
            delta,
            coupling_rate_factor(i_p),
            noise_model.a_amp,
            noise_model.alpha,
            noise_model.b,
            noise_model.gamma,
            noise_model.hbar_beta,
            noise_model.omega_l * si,
            noise_model.omega_h * si,
        ]
    )
    f_max = math.hypot(epsilon, delta)
    max_step = 1.0 / (options.max_step_periods * f_max)
    ys, steps = _evolve_rho(
        _integrate.ame_rhs_nb,
        rho0.reshape(-1).astype(np.complex128),
        np.array([0.0, t_final]),
        fp,
        _EMPTY_GX,
        _EMPTY_GC,
        options,
        max_step,
    )
    p_g, p_e, _ = _readout(_rho_from_vec(ys[-1]), frame)
    return EvolutionResult(p_g=p_g, p_e=p_e, steps=steps)

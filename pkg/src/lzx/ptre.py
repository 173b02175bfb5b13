"""Polaron-transformed Redfield equation: strong-coupling propagator.

In the polaron frame the Hamiltonian is the bare detuning drift -(eps/2)sz,
tunneling enters through the Lindblad pair (delta/2) sigma+/- and the noise
through a hybrid PSD: a Gaussian low-frequency line parameterized by the MRT
width W and reorganization energy eps_p, convolved with a Lorentzian-cut
ohmic high-frequency kernel,

    G_L(w) = sqrt(pi/2)/W * exp(-(w - 4 eps_p)^2 / (8 W^2))
    G_H(w) = 4 S_ohm(w) Ip^2 / (w^2 + 4 S_ohm(0) Ip^2)
    S(w)   = int dw'/2pi G_L(w - w') G_H(w') / N_H

(all in angular-frequency units with hbar = 1).  N_H is the spectral weight
of the high-frequency kernel; dividing it out restores the unit-weight
normalization required of the redistribution kernel, so that the
well-to-well transition weight integrated across the sweep reproduces the
coherent LZ exponent in the fast-line limit.  G_L integrates to one over
dw/2pi by construction and the Gaussian line obeys detailed balance at the
bath temperature whenever W^2 = 2 k_B T eps_p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, simpson, solve_ivp
from scipy.interpolate import PchipInterpolator

from . import _integrate
from .ame import SolverOptions, _readout, _rho_from_vec, eigenframe
from .device import epsilon_at, hamiltonian_at, sweep_velocity
from .errors import NumericsError
from .noise import coupling_rate_factor, psd_ohmic
from .trajectory import EvolutionResult
from .units import TWO_PI


def g_low(mrt, omega):
    """Gaussian low-frequency line at omega in rad/ns, in ns.

    Normalized so that int g_low dw/2pi = 1; peaks at 4*eps_p with standard
    deviation 2W (angular units).
    """
    w_ang = TWO_PI * mrt.w
    center = 4.0 * TWO_PI * mrt.epsilon_p
    arg = (omega - center) ** 2 / (8.0 * w_ang**2)
    if arg > 700.0:
        return 0.0
    return math.sqrt(math.pi / 2.0) / w_ang * math.exp(-arg)


def _ohmic_rate(noise_model, i_p, omega):
    """Ohmic PSD scaled to a rate in 1/ns at omega in rad/ns."""
    return coupling_rate_factor(i_p) * psd_ohmic(noise_model, omega)


def g_high(noise_model, i_p, omega):
    """High-frequency kernel 4 s(w) / (w^2 + 4 s(0)), dimensionless at w=0.

    s is the ohmic PSD in rate units; the w = 0 value is exactly 1 by the
    analytic ohmic limit.
    """
    s_w = _ohmic_rate(noise_model, i_p, omega)
    s_0 = _ohmic_rate(noise_model, i_p, 0.0)
    return 4.0 * s_w / (omega**2 + 4.0 * s_0)


def g_high_weight(noise_model, i_p, rtol=1e-10):
    """Spectral weight int dw/2pi of g_high over |w| <= omega_h.

    The kernel's 1/|w| tail makes the unbounded integral diverge slowly;
    the ohmic high-frequency cutoff bounds it.
    """
    s_0 = _ohmic_rate(noise_model, i_p, 0.0)
    a = 2.0 * math.sqrt(s_0)
    lim = noise_model.omega_h
    if 25.0 * a >= lim:
        raise NumericsError("high-frequency kernel wider than the ohmic cutoff")

    def f(w):
        return g_high(noise_model, i_p, w)

    total = 0.0
    for lo, hi, pts in (
        (-lim, -25.0 * a, None),
        (-25.0 * a, 25.0 * a, [-a, 0.0, a]),
        (25.0 * a, lim, None),
    ):
        val, err = quad(f, lo, hi, points=pts, epsabs=0.0, epsrel=rtol, limit=200)
        total += val
    return total / TWO_PI


def polaron_psd(mrt, noise_model, i_p, omega, rtol=1e-9, high_kernel=None):
    """Polaron-frame PSD at omega in rad/ns by direct adaptive quadrature.

    high_kernel overrides g_high (it is re-normalized to unit spectral
    weight the same way); used to validate the delta-kernel limit.
    """
    if high_kernel is None:
        kernel = lambda w: g_high(noise_model, i_p, w)
        weight = g_high_weight(noise_model, i_p)
    else:
        kernel = high_kernel
        weight, err = quad(
            kernel,
            -noise_model.omega_h,
            noise_model.omega_h,
            points=[0.0],
            epsabs=0.0,
            epsrel=1e-10,
            limit=200,
        )
        weight /= TWO_PI

    w_ang = TWO_PI * mrt.w
    sigma = 2.0 * w_ang
    center = omega - 4.0 * TWO_PI * mrt.epsilon_p
    s_0 = _ohmic_rate(noise_model, i_p, 0.0)
    a = 2.0 * math.sqrt(s_0)
    lo = min(-noise_model.omega_h, center - 12.0 * sigma)
    hi = max(noise_model.omega_h, center + 12.0 * sigma)
    pts = sorted(
        p
        for p in (-a, 0.0, a, center - 3.0 * sigma, center, center + 3.0 * sigma)
        if lo < p < hi
    )

    def f(w):
        return g_low(mrt, omega - w) * kernel(w)

    val, err, info, *tail = quad(
        f, lo, hi, points=pts, epsabs=0.0, epsrel=rtol, limit=400, full_output=1
    )
    if tail:
        raise NumericsError(f"polaron PSD quadrature failed at omega={omega}: {tail[0]}")
    return val / (TWO_PI * weight)


@dataclass(frozen=True)
class PolaronSpectrum:
    """Precomputed polaron-frame PSD on a dense grid with a cubic accessor."""

    mrt: object
    noise_model: object
    i_p: float
    omega: np.ndarray
    values: np.ndarray
    gx: np.ndarray = field(repr=False, default=None)
    gc: np.ndarray = field(repr=False, default=None)

    @classmethod
    def build(cls, mrt, noise_model, i_p, eps_max, resolution=20):
        """Tabulate the convolution over |w| <= 2pi*span.

        span covers max(10*(4 eps_p + 2W), 2*eps_max) GHz at a resolution of
        W/resolution, wide and fine enough that the interpolant tracks the
        direct quadrature to better than 1e-4.
        """
        span_ghz = max(10.0 * (4.0 * mrt.epsilon_p + 2.0 * mrt.w), 2.0 * eps_max)
        span = TWO_PI * span_ghz
        step = TWO_PI * mrt.w / resolution
        n = 2 * int(math.ceil(span / step)) + 1
        grid = np.linspace(-span, span, n)

        w_ang = TWO_PI * mrt.w
        sigma = 2.0 * w_ang
        s_0 = _ohmic_rate(noise_model, i_p, 0.0)
        a = 2.0 * math.sqrt(s_0)
        lim = max(noise_model.omega_h, span + 10.0 * sigma)

        # composite nodes: a fine window resolving the Lorentzian spike of
        # g_high around zero, plus a uniform grid resolving the Gaussian
        spike = np.linspace(-25.0 * a, 25.0 * a, 501)
        outer_step = sigma / 10.0
        n_out = int(math.ceil((lim - 25.0 * a) / outer_step))
        right = np.linspace(25.0 * a, lim, n_out + 1)
        nodes = np.concatenate([-right[::-1], spike[1:-1], right])

        gh = np.array([g_high(noise_model, i_p, w) for w in nodes])
        weight = g_high_weight(noise_model, i_p)

        center = 4.0 * TWO_PI * mrt.epsilon_p
        values = np.empty(n)
        chunk = 1024
        for start in range(0, n, chunk):
            om = grid[start : start + chunk, None]
            arg = (om - nodes[None, :] - center) ** 2 / (8.0 * w_ang**2)
            gl = math.sqrt(math.pi / 2.0) / w_ang * np.exp(-np.minimum(arg, 700.0))
            gl[arg >= 700.0] = 0.0
            values[start : start + chunk] = simpson(gl * gh[None, :], x=nodes)
        values /= TWO_PI * weight
        np.clip(values, 0.0, None, out=values)

        interp = PchipInterpolator(grid, values, extrapolate=False)
        return cls(
            mrt=mrt,
            noise_model=noise_model,
            i_p=i_p,
            omega=grid,
            values=values,
            gx=np.ascontiguousarray(interp.x),
            gc=np.ascontiguousarray(interp.c),
        )

    def __call__(self, omega):
        return float(_integrate.pchip_eval(self.gx, self.gc, omega))


def _initial_rho(schedule):
    """Projector on the lower-energy persistent-current state at t = 0."""
    rho = np.zeros((2, 2), dtype=np.complex128)
    if epsilon_at(schedule, 0.0) < 0.0:
        rho[1, 1] = 1.0
    else:
        rho[0, 0] = 1.0
    return rho


def evolve_ptre(
    schedule,
    mrt,
    noise_model,
    options=None,
    sample_times=None,
    spectrum=None,
    direct_psd=False,
):
    """Propagate the polaron-frame Redfield equation over the sweep.

    Starts from the lower-energy persistent-current projector; final (and
    sampled) populations are mapped to the instantaneous eigenbasis of the
    lab-frame Hamiltonian.  With direct_psd=True the PSD is evaluated by
    quadrature at every right-hand-side call instead of from the
    precomputed table (validation path, slow).
    """
    options = options or SolverOptions()
    eps0 = epsilon_at(schedule, 0.0)
    eps1 = epsilon_at(schedule, schedule.t_lz)
    if spectrum is None and not direct_psd:
        spectrum = PolaronSpectrum.build(
            mrt, noise_model, schedule.point.i_p, max(abs(eps0), abs(eps1))
        )

    rho0 = _initial_rho(schedule)
    y0 = rho0.reshape(-1)
    t_end = schedule.t_lz
    if sample_times is None:
        grid = np.array([0.0, t_end])
    else:
        inner = [t for t in sample_times if 0.0 < t < t_end]
        grid = np.array([0.0, *inner, t_end])

    v = sweep_velocity(schedule)
    delta = schedule.point.delta
    if direct_psd:
        pref = (math.pi * delta) ** 2

        def rhs(t, y):
            e = eps0 + v * t
            w_b = TWO_PI * e
            g_dn = pref * polaron_psd(mrt, noise_model, schedule.point.i_p, w_b)
            g_up = pref * polaron_psd(mrt, noise_model, schedule.point.i_p, -w_b)
            r00, r01, r10, r11 = y
            chalf = -1j * TWO_PI
            return np.array(
                [
                    g_dn * r11 - g_up * r00,
                    chalf * (-e * r01) - 0.5 * (g_dn + g_up) * r01,
                    chalf * (e * r10) - 0.5 * (g_dn + g_up) * r10,
                    g_up * r00 - g_dn * r11,
                ]
            )

        sol = solve_ivp(
            rhs,
            (0.0, t_end),
            y0,
            t_eval=grid,
            method="RK45",
            rtol=options.rtol,
            atol=options.atol,
        )
        if not sol.success:
            raise NumericsError(f"direct-PSD PTRE integration failed: {sol.message}")
        ys = list(sol.y.T)
        steps = int(sol.nfev // 6)
    else:
        fp = np.array([eps0, v, delta])
        ys = [y0]
        steps = 0
        y = y0
        for t0, t1 in zip(grid[:-1], grid[1:]):
            y, status, n_acc = _integrate.dp45(
                _integrate.ptre_rhs_nb,
                y,
                t0,
                t1,
                fp,
                spectrum.gx,
                spectrum.gc,
                options.rtol,
                options.atol,
                np.inf,
                options.max_steps,
            )
            steps += n_acc
            if status != 0:
                raise NumericsError(
                    f"PTRE integrator failed with status {status} in [{t0}, {t1}] ns"
                )
            ys.append(y)

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

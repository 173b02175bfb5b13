"""Jitted adaptive integrators for the 2x2 system.

Two propagation cores live here:

* ``dp45``: an embedded Dormand-Prince 5(4) step controller for the master
  equations, operating on a complex state vector (the flattened density
  matrix).  The right-hand sides preserve trace and Hermiticity exactly, so
  solver drift in those invariants stays at roundoff.
* ``magnus_schrodinger``: a 4th-order commutator-free Magnus propagator for
  the closed-system sweep, built from exact 2x2 exponentials.  Every step is
  exactly unitary, so the state norm is conserved to roundoff over
  arbitrarily long sweeps; the error estimate compares against a midpoint
  exponential.

Status codes returned by both: 0 success, 1 step size underflow, 2 step
budget exhausted, 3 non-finite state.
"""

import math

import numpy as np
from numba import njit

from ._kernels import psd_ame_si

# Dormand-Prince 5(4) tableau (7 stages, FSAL)
_C = (0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0)
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
)
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

MAX_STEPS_DEFAULT = 80_000_000


@njit(cache=True, nogil=True)
def dp45(rhs, y0, t0, t1, fp, gx, gc, rtol, atol, max_step, max_steps):
    """Integrate dy/dt = rhs(t, y) from t0 to t1 with DP 5(4) step control.

    rhs(t, y, out, fp, gx, gc) fills ``out`` in place; fp carries scalar
    parameters, (gx, gc) an optional interpolation table.  Returns
    (y, status, n_accepted).
    """
    n = y0.shape[0]
    y = y0.copy()
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n, dtype=np.complex128)
    k3 = np.empty(n, dtype=np.complex128)
    k4 = np.empty(n, dtype=np.complex128)
    k5 = np.empty(n, dtype=np.complex128)
    k6 = np.empty(n, dtype=np.complex128)
    k7 = np.empty(n, dtype=np.complex128)
    ytmp = np.empty(n, dtype=np.complex128)
    ynew = np.empty(n, dtype=np.complex128)

    span = t1 - t0
    if span <= 0.0:
        return y, 0, 0

    t = t0
    h = min(max_step, span * 1e-3)
    h_min = span * 1e-14
    rhs(t, y, k1, fp, gx, gc)
    n_acc = 0
    n_tot = 0

    while t < t1:
        n_tot += 1
        if n_tot > max_steps:
            return y, 2, n_acc
        if h < h_min:
            return y, 1, n_acc
        if t + h > t1:
            h = t1 - t

        for i in range(n):
            ytmp[i] = y[i] + h * _A21 * k1[i]
        rhs(t + _C[0] * h, ytmp, k2, fp, gx, gc)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A31 * k1[i] + _A32 * k2[i])
        rhs(t + _C[1] * h, ytmp, k3, fp, gx, gc)
        for i in range(n):
            ytmp[i] = y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        rhs(t + _C[2] * h, ytmp, k4, fp, gx, gc)
        for i in range(n):
            ytmp[i] = y[i] + h * (
                _A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i]
            )
        rhs(t + _C[3] * h, ytmp, k5, fp, gx, gc)
        for i in range(n):
            ytmp[i] = y[i] + h * (
                _A61 * k1[i]
                + _A62 * k2[i]
                + _A63 * k3[i]
                + _A64 * k4[i]
                + _A65 * k5[i]
            )
        rhs(t + _C[4] * h, ytmp, k6, fp, gx, gc)
        for i in range(n):
            ynew[i] = y[i] + h * (
                _B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i]
            )
        rhs(t + h, ynew, k7, fp, gx, gc)

        err = 0.0
        ok = True
        for i in range(n):
            e_i = h * (
                _E1 * k1[i]
                + _E3 * k3[i]
                + _E4 * k4[i]
                + _E5 * k5[i]
                + _E6 * k6[i]
                + _E7 * k7[i]
            )
            mag = max(abs(y[i]), abs(ynew[i]))
            if not math.isfinite(mag):
                ok = False
                break
            scale = atol + rtol * mag
            r = abs(e_i) / scale
            err += r * r
        if not ok:
            return y, 3, n_acc
        err = math.sqrt(err / n)

        if err <= 1.0:
            t += h
            for i in range(n):
                y[i] = ynew[i]
                k1[i] = k7[i]
            n_acc += 1
            if err == 0.0:
                fac = 10.0
            else:
                fac = min(10.0, max(0.2, 0.9 * err ** (-0.2)))
            h = min(fac * h, max_step)
        else:
            h = max(0.2, 0.9 * err ** (-0.2)) * h

    return y, 0, n_acc


# commutator-free Magnus-4 nodes and weights (Gauss-Legendre pair)
_SQRT3_6 = math.sqrt(3.0) / 6.0
_CF_A1 = 0.25 + _SQRT3_6
_CF_A2 = 0.25 - _SQRT3_6


@njit(cache=True, inline="always")
def _apply_rot(psi0, psi1, wz, wx):
    """Apply exp(-i (wz sigma_z + wx sigma_x)) to (psi0, psi1)."""
    r = math.hypot(wz, wx)
    if r == 0.0:
        return psi0, psi1
    c = math.cos(r)
    s = math.sin(r) / r
    new0 = c * psi0 - 1j * s * (wz * psi0 + wx * psi1)
    new1 = c * psi1 - 1j * s * (wx * psi0 - wz * psi1)
    return new0, new1


@njit(cache=True, nogil=True)
def magnus_schrodinger(psi0, t0, t1, e0, erate, delta, rtol, atol, max_step, max_steps):
    """Propagate a pure state through the sweep H(t) = -(e/2)sz - (delta/2)sx.

    e(t) = e0 + erate*t in GHz.  Steps are products of exact 2x2
    exponentials (4th-order commutator-free Magnus), compared against a
    single midpoint exponential for step control.  Returns
    (psi, status, n_accepted).
    """
    two_pi = 2.0 * math.pi
    p0 = psi0[0]
    p1 = psi0[1]
    span = t1 - t0
    out = np.empty(2, dtype=np.complex128)
    if span <= 0.0:
        out[0] = p0
        out[1] = p1
        return out, 0, 0

    t = t0
    h = min(max_step, span * 1e-3)
    h_min = span * 1e-14
    n_acc = 0
    n_tot = 0

    while t < t1:
        n_tot += 1
        if n_tot > max_steps:
            out[0] = p0
            out[1] = p1
            return out, 2, n_acc
        if h < h_min:
            out[0] = p0
            out[1] = p1
            return out, 1, n_acc
        if t + h > t1:
            h = t1 - t

        e_n1 = e0 + erate * (t + (0.5 - _SQRT3_6) * h)
        e_n2 = e0 + erate * (t + (0.5 + _SQRT3_6) * h)

        # first factor weights the early node, second the late one
        wz1 = two_pi * h * (-(_CF_A1 * e_n1 + _CF_A2 * e_n2) / 2.0)
        wz2 = two_pi * h * (-(_CF_A2 * e_n1 + _CF_A1 * e_n2) / 2.0)
        wx = two_pi * h * (-delta / 4.0)

        a0, a1 = _apply_rot(p0, p1, wz1, wx)
        a0, a1 = _apply_rot(a0, a1, wz2, wx)

        e_mid = e0 + erate * (t + 0.5 * h)
        m0, m1 = _apply_rot(
            p0, p1, two_pi * h * (-e_mid / 2.0), two_pi * h * (-delta / 2.0)
        )

        est = math.sqrt(abs(a0 - m0) ** 2 + abs(a1 - m1) ** 2)
        err = est / (atol + rtol)
        if not math.isfinite(err):
            out[0] = p0
            out[1] = p1
            return out, 3, n_acc

        if err <= 1.0:
            t += h
            p0 = a0
            p1 = a1
            n_acc += 1
            if err == 0.0:
                fac = 10.0
            else:
                fac = min(10.0, max(0.2, 0.9 * err ** (-1.0 / 3.0)))
            h = min(fac * h, max_step)
        else:
            h = max(0.2, 0.9 * err ** (-1.0 / 3.0)) * h

    out[0] = p0
    out[1] = p1
    return out, 0, n_acc


@njit(cache=True, nogil=True)
def ame_rhs_nb(t, y, out, fp, gx, gc):
    """AME generator in the persistent-current basis.

    y = (r00, r01, r10, r11); fp = (e0, erate, delta, kfac, a_amp, alpha, b,
    gamma, hbar_beta, wl_si, wh_si) with kfac the PSD-to-rate conversion for
    the operating point's persistent current.
    """
    e = fp[0] + fp[1] * t
    delta = fp[2]
    kfac = fp[3]
    two_pi = 2.0 * math.pi

    r00 = y[0]
    r01 = y[1]
    r10 = y[2]
    r11 = y[3]

    # -i*2pi*[H, rho]
    chalf = -1j * two_pi
    dd = 0.5 * delta
    out[0] = chalf * (-dd * (r10 - r01))
    out[1] = chalf * (-e * r01 + dd * (r00 - r11))
    out[2] = chalf * (e * r10 + dd * (r11 - r00))
    out[3] = chalf * (dd * (r10 - r01))

    g = math.hypot(e, delta)
    wq_si = two_pi * g * 1e9
    cos_t = e / g
    sin_t = delta / g

    s_0 = kfac * psd_ame_si(0.0, fp[4], fp[5], fp[6], fp[7], fp[8], fp[9], fp[10])
    s_p = kfac * psd_ame_si(wq_si, fp[4], fp[5], fp[6], fp[7], fp[8], fp[9], fp[10])
    s_m = kfac * psd_ame_si(-wq_si, fp[4], fp[5], fp[6], fp[7], fp[8], fp[9], fp[10])

    # dephasing operator cos_t * (|g><g| - |e><e|) and the down/up pair
    # sin_t * |g><e|, sin_t * |e><g| expressed in the PC basis
    a0_00 = cos_t * cos_t
    a0_01 = cos_t * sin_t
    a0_11 = -a0_00
    nd_00 = 0.5 * sin_t
    nd_01 = -0.5 * (1.0 + cos_t)
    nd_10 = 0.5 * (1.0 - cos_t)
    nd_11 = -0.5 * sin_t

    for which in range(3):
        if which == 0:
            gam = s_0
            a00 = a0_00
            a01 = a0_01
            a10 = a0_01
            a11 = a0_11
        elif which == 1:
            gam = s_p
            a00 = sin_t * nd_00
            a01 = sin_t * nd_01
            a10 = sin_t * nd_10
            a11 = sin_t * nd_11
        else:
            gam = s_m
            a00 = sin_t * nd_00
            a01 = sin_t * nd_10
            a10 = sin_t * nd_01
            a11 = sin_t * nd_11
        if gam == 0.0:
            continue

        b00 = a00 * r00 + a01 * r10
        b01 = a00 * r01 + a01 * r11
        b10 = a10 * r00 + a11 * r10
        b11 = a10 * r01 + a11 * r11
        # (A rho A^T)_ij = sum_k B_ik A_jk
        s00 = b00 * a00 + b01 * a01
        s01 = b00 * a10 + b01 * a11
        s10 = b10 * a00 + b11 * a01
        s11 = b10 * a10 + b11 * a11
        # M = A^T A (real symmetric)
        m00 = a00 * a00 + a10 * a10
        m01 = a00 * a01 + a10 * a11
        m11 = a01 * a01 + a11 * a11
        ac00 = m00 * r00 + m01 * r10 + r00 * m00 + r01 * m01
        ac01 = m00 * r01 + m01 * r11 + r00 * m01 + r01 * m11
        ac10 = m01 * r00 + m11 * r10 + r10 * m00 + r11 * m01
        ac11 = m01 * r01 + m11 * r11 + r10 * m01 + r11 * m11
        out[0] += gam * (s00 - 0.5 * ac00)
        out[1] += gam * (s01 - 0.5 * ac01)
        out[2] += gam * (s10 - 0.5 * ac10)
        out[3] += gam * (s11 - 0.5 * ac11)


@njit(cache=True, nogil=True)
def ame_rate_rhs_nb(t, y, out, fp, gx, gc):
    """Eigenbasis-diagonal rate-equation tail: populations only.

    y = (p_g, p_e) as complex storage; fp as in ame_rhs_nb.
    """
    e = fp[0] + fp[1] * t
    delta = fp[2]
    kfac = fp[3]
    g = math.hypot(e, delta)
    wq_si = 2.0 * math.pi * g * 1e9
    sin_t = delta / g
    me2 = sin_t * sin_t
    s_p = kfac * psd_ame_si(wq_si, fp[4], fp[5], fp[6], fp[7], fp[8], fp[9], fp[10])
    s_m = kfac * psd_ame_si(-wq_si, fp[4], fp[5], fp[6], fp[7], fp[8], fp[9], fp[10])
    down = me2 * s_p * y[1]
    up = me2 * s_m * y[0]
    out[0] = down - up
    out[1] = up - down


@njit(cache=True, nogil=True)
def ptre_rhs_nb(t, y, out, fp, gx, gc):
    """Polaron-frame generator: diagonal drift plus well-to-well rates.

    y = (r00, r01, r10, r11); fp = (e0, erate, delta); (gx, gc) hold the
    piecewise-cubic table of the polaron-frame PSD versus angular frequency.
    """
    e = fp[0] + fp[1] * t
    delta = fp[2]
    two_pi = 2.0 * math.pi

    r00 = y[0]
    r01 = y[1]
    r10 = y[2]
    r11 = y[3]

    chalf = -1j * two_pi
    out[0] = 0.0 + 0.0j
    out[1] = chalf * (-e * r01)
    out[2] = chalf * (e * r10)
    out[3] = 0.0 + 0.0j

    pref = (math.pi * delta) ** 2
    w_b = two_pi * e
    g_dn = pref * pchip_eval(gx, gc, w_b)
    g_up = pref * pchip_eval(gx, gc, -w_b)

    out[0] += g_dn * r11 - g_up * r00
    out[3] += g_up * r00 - g_dn * r11
    out[1] -= 0.5 * (g_dn + g_up) * r01
    out[2] -= 0.5 * (g_dn + g_up) * r10


@njit(cache=True, nogil=True)
def pchip_eval(gx, gc, x):
    """Evaluate a PCHIP table (breakpoints gx, coefficients gc) at x.

    Returns 0 outside the table, which for the polaron PSD means the far
    Gaussian tail.
    """
    n = gx.shape[0]
    if x < gx[0] or x > gx[n - 1]:
        return 0.0
    idx = np.searchsorted(gx, x) - 1
    if idx < 0:
        idx = 0
    if idx > n - 2:
        idx = n - 2
    dx = x - gx[idx]
    return ((gc[0, idx] * dx + gc[1, idx]) * dx + gc[2, idx]) * dx + gc[3, idx]

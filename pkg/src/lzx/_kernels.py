"""Scalar numba kernels for the noise PSDs.

These are the single source of truth for the spectral functions; the public
wrappers in :mod:`lzx.noise` and the jitted master-equation right-hand sides
both call them.  All kernels work in SI angular frequency (rad/s) and return
PSD values in Phi0^2/Hz.
"""

import math

from numba import njit


@njit(cache=True)
def one_plus_coth(x):
    """Stable 1 + coth(x).

    Evaluating coth and adding 1 cancels catastrophically for x << 0 (the
    detailed-balance-suppressed side); expm1 keeps full precision on both
    sides.  Series below |x| = 1e-6.
    """
    if abs(x) < 1e-6:
        return 1.0 + 1.0 / x + x / 3.0
    if x > 0.0:
        return 2.0 + 2.0 / math.expm1(2.0 * x)
    return -2.0 / math.expm1(-2.0 * x)


@njit(cache=True)
def psd_one_over_f_si(w, a_amp, alpha, hbar_beta):
    """Quantum 1/f PSD  A * w/|w|^alpha * [1 + coth(beta*hbar*w/2)]."""
    return a_amp * w / abs(w) ** alpha * one_plus_coth(0.5 * hbar_beta * w)


@njit(cache=True)
def psd_ohmic_si(w, b, gamma, hbar_beta):
    """Quantum ohmic PSD  B * w*|w|^(gamma-1) * [1 + coth(beta*hbar*w/2)].

    The w -> 0 limit is taken analytically: for gamma = 1 it is 2B/(hbar*beta).
    """
    if w == 0.0:
        if gamma == 1.0:
            return 2.0 * b / hbar_beta
        if gamma > 1.0:
            return 0.0
        return math.inf
    return b * w * abs(w) ** (gamma - 1.0) * one_plus_coth(0.5 * hbar_beta * w)


@njit(cache=True)
def psd_ame_si(w, a_amp, alpha, b, gamma, hbar_beta, w_l, w_h):
    """Cutoff-regularized PSD used by the adiabatic master equation.

    Piecewise: above the low cutoff both components carry the exponential
    high-frequency cutoff; inside |w| <= w_l the 1/f part is clamped at its
    value at +w_l (which locally breaks detailed balance, by construction).
    """
    cut = math.exp(-abs(w) / w_h)
    ohmic = psd_ohmic_si(w, b, gamma, hbar_beta) * cut
    if abs(w) > w_l:
        return psd_one_over_f_si(w, a_amp, alpha, hbar_beta) * cut + ohmic
    clamp = psd_one_over_f_si(w_l, a_amp, alpha, hbar_beta) * math.exp(-w_l / w_h)
    return clamp + ohmic

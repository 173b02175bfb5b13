"""Flux-noise model: 1/f + ohmic quantum PSDs and the MRT parameters.

The quantum PSD follows the hybrid form

    S(w) = S_1f(w) + S_ohmic(w)
    S_1f(w)    = A w/|w|^alpha [1 + coth(beta*hbar*w/2)]
    S_ohmic(w) = B w |w|^(gamma-1) [1 + coth(beta*hbar*w/2)]

with the 1/f amplitude specified through the 1 Hz-referenced A*, related to
the raw amplitude by A* = 2A/[hbar*beta*(2pi)^alpha].  Public functions take
angular frequency in rad/ns and return PSD values in Phi0^2/Hz.

The MRT width W and reorganization energy eps_p are integrals of the
(anti-)symmetrized 1/f PSD over [w_low, w_high] (positive frequencies, as
the integration limits are written); W and the fluctuation-dissipation
relation eps_p = W^2/(2 k_B T) reproduce the predicted MRT widths for this
device's current range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad

from . import _kernels
from .errors import NumericsError
from .units import CONSTANTS, TWO_PI, thermal_energy

# rad/ns -> rad/s
_OMEGA_SI = 1e9


@dataclass(frozen=True)
class NoiseModel:
    """1/f + ohmic quantum noise parameters with all cutoffs.

    a_star is the 1/f amplitude at the 1 Hz normalization in Phi0^2/Hz, b the
    ohmic amplitude in Phi0^2/Hz^2, temperature in K.  The omega_* fields are
    angular frequencies in rad/ns: (omega_l, omega_h) are the AME cutoffs and
    (omega_low_mrt, omega_high_mrt) the MRT integration limits.  Defaults are
    the nominal device values.
    """

    a_star: float = (8.7e-6) ** 2
    alpha: float = 0.91
    b: float = 1.3e-30
    gamma: float = 1.0
    temperature: float = 0.020
    omega_l: float = TWO_PI * 0.010
    omega_h: float = TWO_PI * 10.0
    omega_low_mrt: float = TWO_PI * 4e-9
    omega_high_mrt: float = TWO_PI * 10.0

    def __post_init__(self):
        if self.a_star < 0.0 or self.b < 0.0:
            raise ValueError("noise amplitudes must be nonnegative")
        if self.temperature <= 0.0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if not (0.0 < self.alpha < 2.0):
            raise ValueError(f"alpha must be in (0, 2), got {self.alpha}")
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.omega_l >= self.omega_h:
            raise ValueError("omega_l must be below omega_h")
        if self.omega_low_mrt >= self.omega_high_mrt:
            raise ValueError("omega_low_mrt must be below omega_high_mrt")

    @property
    def hbar_beta(self):
        """hbar/(k_B T) in seconds."""
        return CONSTANTS.hbar / (CONSTANTS.boltzmann * self.temperature)

    @property
    def a_amp(self):
        """Raw 1/f amplitude paired with angular frequency in rad/s."""
        return amplitude_from_a_star(self.a_star, self.alpha, self.temperature)

    def scaled(self, t_scale=1.0):
        """Copy with the bath temperature multiplied by t_scale."""
        return replace(self, temperature=self.temperature * t_scale)


@dataclass(frozen=True)
class MrtParams:
    """MRT width W/h and reorganization energy eps_p/h, both in GHz."""

    w: float
    epsilon_p: float

    def __post_init__(self):
        if self.w <= 0.0 or self.epsilon_p <= 0.0:
            raise ValueError("MRT parameters must be positive")


def amplitude_from_a_star(a_star, alpha, temperature):
    """Invert A* = 2A/[hbar*beta*(2pi)^alpha] for the raw amplitude A."""
    hbar_beta = CONSTANTS.hbar / (CONSTANTS.boltzmann * temperature)
    return a_star * hbar_beta * TWO_PI**alpha / 2.0


def psd_one_over_f(model, omega):
    """Quantum 1/f PSD at omega in rad/ns, in Phi0^2/Hz.

    Diverges at omega = 0 (raises ValueError).
    """
    if omega == 0.0:
        raise ValueError("1/f PSD diverges at omega = 0")
    return _kernels.psd_one_over_f_si(
        omega * _OMEGA_SI, model.a_amp, model.alpha, model.hbar_beta
    )


def psd_ohmic(model, omega):
    """Quantum ohmic PSD at omega in rad/ns, in Phi0^2/Hz (finite at 0)."""
    return _kernels.psd_ohmic_si(
        omega * _OMEGA_SI, model.b, model.gamma, model.hbar_beta
    )


def psd_ame(model, omega):
    """Cutoff-regularized PSD used by the AME, at omega in rad/ns."""
    return _kernels.psd_ame_si(
        omega * _OMEGA_SI,
        model.a_amp,
        model.alpha,
        model.b,
        model.gamma,
        model.hbar_beta,
        model.omega_l * _OMEGA_SI,
        model.omega_h * _OMEGA_SI,
    )


def symmetrize(psd, omega):
    """S+(w) = [S(w) + S(-w)]/2 for a PSD callable of omega."""
    return 0.5 * (psd(omega) + psd(-omega))


def antisymmetrize(psd, omega):
    """S-(w) = [S(w) - S(-w)]/2 for a PSD callable of omega."""
    return 0.5 * (psd(omega) - psd(-omega))


def coupling_rate_factor(i_p):
    """(I_p Phi0/hbar)^2 scaled so S_val[Phi0^2/Hz] * factor is a rate in 1/ns.

    i_p is in uA.
    """
    return (i_p * 1e-6 * CONSTANTS.flux_quantum / CONSTANTS.hbar) ** 2 * 1e-9


def _quad_log_panels(f, w_low, w_high, rtol):
    """Adaptive Gauss-Kronrod on a log-spaced partition of [w_low, w_high].

    The 1/f integrands vary over ~13 decades; integrating decade-size panels
    keeps the adaptive rule well conditioned.
    """
    n_panels = max(int(math.ceil(3.0 * math.log10(w_high / w_low))), 1)
    edges = np.logspace(math.log10(w_low), math.log10(w_high), n_panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err, info, *tail = quad(
            f, a, b, epsabs=0.0, epsrel=rtol, limit=200, full_output=1
        )
        if tail:
            raise NumericsError(
                f"quadrature failed on panel [{a:.3e}, {b:.3e}] rad/s: {tail[0]}"
            )
        total += val
    return total


def mrt_width(model, i_p, rtol=1e-8):
    """MRT width W/h in GHz:  W^2 = 2 I_p^2 int dw/2pi S+_1f(w).

    The integral runs over positive frequencies w in [omega_low_mrt,
    omega_high_mrt].
    """
    if i_p <= 0.0:
        raise ValueError(f"i_p must be positive, got {i_p}")

    def s_plus(w_si):
        return symmetrize(
            lambda w: _kernels.psd_one_over_f_si(
                w, model.a_amp, model.alpha, model.hbar_beta
            ),
            w_si,
        )

    integral = _quad_log_panels(
        s_plus, model.omega_low_mrt * _OMEGA_SI, model.omega_high_mrt * _OMEGA_SI, rtol
    )
    w_sq_joule = (
        2.0
        * (i_p * 1e-6 * CONSTANTS.flux_quantum) ** 2
        * integral
        / TWO_PI
    )
    return math.sqrt(w_sq_joule) / CONSTANTS.planck * 1e-9


def reorganization_energy_integral(model, i_p, rtol=1e-8):
    """eps_p/h in GHz by direct quadrature of 2 I_p^2 int dw/2pi S-_1f(w)/(hbar w).

    Exposed for diagnostics; simulations use the FDT value from
    :func:`mrt_params_fdt`.
    """
    if i_p <= 0.0:
        raise ValueError(f"i_p must be positive, got {i_p}")

    def integrand(w_si):
        s_minus = antisymmetrize(
            lambda w: _kernels.psd_one_over_f_si(
                w, model.a_amp, model.alpha, model.hbar_beta
            ),
            w_si,
        )
        return s_minus / (CONSTANTS.hbar * w_si)

    integral = _quad_log_panels(
        integrand,
        model.omega_low_mrt * _OMEGA_SI,
        model.omega_high_mrt * _OMEGA_SI,
        rtol,
    )
    ep_joule = 2.0 * (i_p * 1e-6 * CONSTANTS.flux_quantum) ** 2 * integral / TWO_PI
    return ep_joule / CONSTANTS.planck * 1e-9


def mrt_params_fdt(model, i_p, rtol=1e-8, w_scale=1.0):
    """MrtParams with W from quadrature and eps_p = W^2/(2 k_B T) exactly.

    w_scale multiplies W before the FDT step (used for parameter-variation
    studies).
    """
    w = mrt_width(model, i_p, rtol=rtol) * w_scale
    epsilon_p = w**2 / (2.0 * thermal_energy(model.temperature))
    return MrtParams(w=w, epsilon_p=epsilon_p)

"""Physical constants and the internal unit conventions.

All dynamical quantities in this package are expressed in a fixed set of
canonical units so that no other module has to carry hbar or unit factors:

* energy: plain frequency in GHz (E/h)
* time: ns
* angular frequency: rad/ns, with omega = 2*pi*f for f in GHz
* flux: units of the flux quantum Phi0
* current: uA
* flux-noise PSD inputs: Phi0^2/Hz

The phase accumulated over a time t at energy E is then 2*pi*E*t, with E in
GHz and t in ns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysConstants:
    """CODATA constants in the combinations the simulator needs.

    Attributes
    ----------
    flux_quantum : float
        Phi0 in Wb.
    planck : float
        h in J*s.
    hbar : float
        h/2pi in J*s.
    boltzmann : float
        k_B in J/K.
    boltzmann_over_planck : float
        k_B/h in GHz/K.
    current_to_freq : float
        Phi0/h scaled to GHz per uA: multiplying a current in uA and a flux
        in Phi0 units by this factor gives an energy in GHz.
    """

    flux_quantum: float = 2.067833848e-15
    planck: float = 6.62607015e-34
    boltzmann: float = 1.380649e-23
    hbar: float = field(init=False)
    boltzmann_over_planck: float = field(init=False)
    current_to_freq: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "hbar", self.planck / TWO_PI)
        object.__setattr__(
            self, "boltzmann_over_planck", self.boltzmann / self.planck * 1e-9
        )
        object.__setattr__(
            self, "current_to_freq", self.flux_quantum / self.planck * 1e-6 * 1e-9
        )


CONSTANTS = PhysConstants()


@dataclass(frozen=True)
class UnitsConvention:
    """Record of the canonical internal units (documentation carrier)."""

    energy: str = "GHz (E/h)"
    time: str = "ns"
    angular_frequency: str = "rad/ns (omega = 2*pi*f, f in GHz)"
    flux: str = "Phi0"
    current: str = "uA"
    psd_input: str = "Phi0^2/Hz"


UNITS = UnitsConvention()


def thermal_energy(temperature):
    """k_B*T/h in GHz for a temperature in K.

    Raises ValueError for non-positive temperatures.
    """
    if temperature <= 0.0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    return CONSTANTS.boltzmann_over_planck * temperature


def persistent_current_energy(i_p, flux_offset):
    """Diabatic detuning eps/h in GHz for a current in uA and offset in Phi0.

    The full separation of the two persistent-current branches is used, so
    that the sweep velocity is d(eps)/dt.
    """
    return 2.0 * i_p * CONSTANTS.current_to_freq * flux_offset


def ghz_to_angular(f):
    """GHz -> rad/ns."""
    return TWO_PI * f


def angular_to_ghz(omega):
    """rad/ns -> GHz."""
    return omega / TWO_PI


def flux_quanta_to_weber(phi):
    """Phi0 units -> Wb."""
    return phi * CONSTANTS.flux_quantum


def weber_to_flux_quanta(phi_wb):
    """Wb -> Phi0 units."""
    return phi_wb / CONSTANTS.flux_quantum


def phase(energy_ghz, time_ns):
    """Dimensionless phase 2*pi*E*t accumulated at energy E over time t."""
    return TWO_PI * energy_ghz * time_ns

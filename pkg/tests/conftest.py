import numpy as np
import pytest

from lzx.device import OperatingPoint, SweepSchedule
from lzx.noise import NoiseModel
from lzx.units import TWO_PI, persistent_current_energy


@pytest.fixture
def nominal_noise():
    return NoiseModel()


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def schedule_for_tau(delta, i_p, tau, guard=100.0, phi_x=0.2):
    """Sweep with given dimensionless time and endpoint guard |eps| = guard*delta."""
    v = TWO_PI * delta**2 / tau
    eps_end = guard * delta
    phi_end = eps_end / persistent_current_energy(i_p, 1.0)
    t_lz = 2.0 * eps_end / v
    return SweepSchedule(
        point=OperatingPoint(phi_x=phi_x, delta=delta, i_p=i_p),
        phi_init=-phi_end,
        phi_final=phi_end,
        t_lz=t_lz,
    )

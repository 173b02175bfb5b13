import math

import numpy as np
import pytest

from conftest import schedule_for_tau
from lzx.coherent import evolve_schrodinger, p_lz, p_lz_schedule, propagate_state
from lzx.device import OperatingPoint, SweepSchedule, dimensionless_time


class TestPlz:
    def test_no_gap(self):
        assert p_lz(0.0, 0.1) == 1.0

    def test_tau_one(self):
        s = schedule_for_tau(0.05, 0.125, 1.0)
        assert p_lz_schedule(s) == pytest.approx(0.207880, abs=1e-6)
        assert p_lz_schedule(s) == pytest.approx(math.exp(-math.pi / 2.0), rel=1e-12)

    def test_sudden_limit(self):
        s = schedule_for_tau(0.05, 0.125, 1e-7)
        assert p_lz_schedule(s) == pytest.approx(1.0, abs=1e-6)

    def test_rejects_bad_velocity(self):
        with pytest.raises(ValueError):
            p_lz(0.05, 0.0)
        with pytest.raises(ValueError):
            p_lz(-0.05, 1.0)


class TestEvolveSchrodinger:
    def test_against_formula_tau_one(self):
        s = schedule_for_tau(0.1, 0.115, 1.0, guard=100.0)
        r = evolve_schrodinger(s)
        assert r.p_e == pytest.approx(0.2079, abs=0.002)

    def test_against_formula_tau_four(self):
        s = schedule_for_tau(0.1, 0.115, 4.0, guard=100.0)
        r = evolve_schrodinger(s)
        assert r.p_e == pytest.approx(math.exp(-2.0 * math.pi), abs=2e-4)

    @pytest.mark.parametrize("tau", [0.01, 0.3, 2.0, 5.0])
    def test_formula_agreement_guard_50(self, tau):
        s = schedule_for_tau(0.08, 0.12, tau, guard=50.0)
        r = evolve_schrodinger(s)
        assert abs(r.p_e - p_lz_schedule(s)) < 0.01

    def test_tiny_gap_follows_diabat(self):
        s = SweepSchedule(
            point=OperatingPoint(phi_x=0.2, delta=1e-8, i_p=0.125),
            phi_init=-0.005,
            phi_final=0.005,
            t_lz=100.0,
        )
        r = evolve_schrodinger(s)
        assert r.p_e > 1.0 - 1e-6

    def test_norm_conserved_along_trajectory(self):
        s = schedule_for_tau(0.1, 0.115, 2.0, guard=100.0)
        samples = np.linspace(0.0, s.t_lz, 41)
        r = evolve_schrodinger(s, sample_times=samples)
        total = r.p_g_t + r.p_e_t
        assert np.max(np.abs(total - 1.0)) < 1e-9

    def test_time_reversal(self):
        s = schedule_for_tau(0.1, 0.115, 1.0, guard=60.0)
        from lzx.ame import eigenframe
        from lzx.device import hamiltonian_at

        psi0 = eigenframe(hamiltonian_at(s, 0.0)).ground.astype(complex)
        fwd, _ = propagate_state(s, psi0, 0.0, s.t_lz)
        back, _ = propagate_state(s, fwd, s.t_lz, 0.0)
        assert np.linalg.norm(back - psi0) < 1e-7

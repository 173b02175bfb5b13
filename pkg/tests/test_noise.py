import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lzx.noise import (
    MrtParams,
    NoiseModel,
    amplitude_from_a_star,
    antisymmetrize,
    mrt_params_fdt,
    mrt_width,
    psd_ame,
    psd_ohmic,
    psd_one_over_f,
    reorganization_energy_integral,
    symmetrize,
)
from lzx.units import CONSTANTS, TWO_PI, thermal_energy


class TestModelValidation:
    def test_defaults_valid(self):
        nm = NoiseModel()
        assert nm.a_star == pytest.approx((8.7e-6) ** 2)
        assert nm.alpha == 0.91
        assert nm.omega_l == pytest.approx(TWO_PI * 0.010)
        assert nm.omega_low_mrt == pytest.approx(TWO_PI * 4e-9)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"a_star": -1.0},
            {"temperature": 0.0},
            {"alpha": 2.5},
            {"gamma": 0.0},
            {"omega_l": 100.0, "omega_h": 1.0},
            {"omega_low_mrt": 100.0, "omega_high_mrt": 1.0},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            NoiseModel(**kwargs)


class TestAmplitude:
    def test_linear_in_a_star(self):
        a1 = amplitude_from_a_star(1e-11, 0.91, 0.02)
        a2 = amplitude_from_a_star(2e-11, 0.91, 0.02)
        assert a2 == pytest.approx(2.0 * a1, rel=1e-14)

    def test_inverse_in_temperature(self):
        a1 = amplitude_from_a_star(1e-11, 0.91, 0.02)
        a2 = amplitude_from_a_star(1e-11, 0.91, 0.01)
        assert a2 == pytest.approx(2.0 * a1, rel=1e-14)

    def test_round_trip(self):
        a_star = (8.7e-6) ** 2
        amp = amplitude_from_a_star(a_star, 0.91, 0.02)
        hbar_beta = CONSTANTS.hbar / (CONSTANTS.boltzmann * 0.02)
        back = 2.0 * amp / (hbar_beta * TWO_PI**0.91)
        assert back == pytest.approx(a_star, rel=1e-12)


class TestOneOverF:
    def test_detailed_balance_at_1ghz(self, nominal_noise):
        # Boltzmann ratio at 1 GHz and 20 mK: exp(-f / (k_B T / h))
        w = TWO_PI * 1.0
        ratio = psd_one_over_f(nominal_noise, -w) / psd_one_over_f(nominal_noise, w)
        oracle = math.exp(-1.0 / thermal_energy(0.020))
        assert oracle == pytest.approx(0.090752, abs=1e-6)
        assert ratio == pytest.approx(oracle, rel=1e-9)

    def test_positive(self, nominal_noise, rng):
        for _ in range(100):
            w = rng.uniform(1e-6, 100.0)
            assert psd_one_over_f(nominal_noise, w) > 0.0

    def test_divergent_at_zero(self, nominal_noise):
        with pytest.raises(ValueError):
            psd_one_over_f(nominal_noise, 0.0)

    def test_classical_limit(self, nominal_noise):
        # f = 1 kHz: hbar*w << k_B T
        w = TWO_PI * 1e-6 * 1e-3
        s_plus = symmetrize(lambda x: psd_one_over_f(nominal_noise, x), w)
        w_si = w * 1e9
        classical = nominal_noise.a_star * (TWO_PI / w_si) ** nominal_noise.alpha
        assert s_plus == pytest.approx(classical, rel=0.01)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=-4.0, max_value=4.0))
    def test_detailed_balance_property(self, log_f):
        nm = NoiseModel()
        w = TWO_PI * 10.0**log_f
        beta_hw = w * 1e9 * nm.hbar_beta
        expected = math.exp(-beta_hw) if beta_hw < 700 else 0.0
        assert psd_one_over_f(nm, -w) == pytest.approx(
            expected * psd_one_over_f(nm, w), rel=1e-9, abs=1e-300
        )


class TestOhmic:
    def test_zero_frequency_limit(self, nominal_noise):
        s0 = psd_ohmic(nominal_noise, 0.0)
        expected = 2.0 * nominal_noise.b / nominal_noise.hbar_beta
        assert s0 == pytest.approx(expected, rel=1e-12)
        assert s0 > 0.0

    def test_limit_continuous(self, nominal_noise):
        s0 = psd_ohmic(nominal_noise, 0.0)
        s_eps = psd_ohmic(nominal_noise, 1e-8)
        assert s_eps == pytest.approx(s0, rel=1e-6)

    def test_detailed_balance_matches_one_over_f(self, nominal_noise):
        w = TWO_PI * 1.0
        r_ohm = psd_ohmic(nominal_noise, -w) / psd_ohmic(nominal_noise, w)
        r_1f = psd_one_over_f(nominal_noise, -w) / psd_one_over_f(nominal_noise, w)
        assert r_ohm == pytest.approx(r_1f, rel=1e-12)

    def test_zero_amplitude(self):
        nm = NoiseModel(b=0.0)
        for w in (0.0, 1.0, -5.0):
            assert psd_ohmic(nm, w) == 0.0


class TestAmePsd:
    def test_continuous_at_low_cutoff(self, nominal_noise):
        wl = nominal_noise.omega_l
        below = psd_ame(nominal_noise, wl * (1.0 - 1e-13))
        above = psd_ame(nominal_noise, wl * (1.0 + 1e-13))
        assert below == pytest.approx(above, rel=1e-9)
        at = psd_ame(nominal_noise, wl)
        assert at == pytest.approx(above, rel=1e-9)

    def test_high_cutoff_suppression(self):
        nm = NoiseModel(b=0.0)
        wh = nm.omega_h
        assert psd_ame(nm, wh) == pytest.approx(
            psd_one_over_f(nm, wh) * math.exp(-1.0), rel=1e-12
        )

    def test_finite_at_zero(self, nominal_noise):
        nm = nominal_noise
        expected = psd_one_over_f(nm, nm.omega_l) * math.exp(
            -nm.omega_l / nm.omega_h
        ) + psd_ohmic(nm, 0.0)
        assert psd_ame(nm, 0.0) == pytest.approx(expected, rel=1e-12)

    def test_clamp_breaks_detailed_balance_inside_window(self, nominal_noise):
        w = 0.5 * nominal_noise.omega_l
        ratio = psd_ame(nominal_noise, -w) / psd_ame(nominal_noise, w)
        beta_hw = w * 1e9 * nominal_noise.hbar_beta
        assert ratio != pytest.approx(math.exp(-beta_hw), rel=1e-3)


class TestSymmetrization:
    def test_even_odd(self, nominal_noise, rng):
        psd = lambda w: psd_one_over_f(nominal_noise, w)
        for _ in range(100):
            w = rng.uniform(1e-4, 80.0)
            assert symmetrize(psd, w) == pytest.approx(symmetrize(psd, -w), rel=1e-12)
            assert antisymmetrize(psd, w) == pytest.approx(
                -antisymmetrize(psd, -w), rel=1e-12
            )

    def test_antisymmetric_part_closed_form(self, nominal_noise, rng):
        # the thermal factor cancels: S- = A w/|w|^alpha
        nm = nominal_noise
        psd = lambda w: psd_one_over_f(nm, w)
        for _ in range(20):
            w = rng.uniform(1e-3, 50.0)
            w_si = w * 1e9
            expected = nm.a_amp * w_si / abs(w_si) ** nm.alpha
            assert antisymmetrize(psd, w) == pytest.approx(expected, rel=1e-12)

    def test_fluctuation_dissipation_form(self, nominal_noise, rng):
        nm = nominal_noise
        psd = lambda w: psd_one_over_f(nm, w)
        for _ in range(20):
            w = rng.uniform(1e-3, 10.0)
            coth = 1.0 / math.tanh(0.5 * w * 1e9 * nm.hbar_beta)
            assert symmetrize(psd, w) == pytest.approx(
                antisymmetrize(psd, w) * coth, rel=1e-10
            )


class TestMrtWidth:
    def test_linear_in_ip(self, nominal_noise):
        w1 = mrt_width(nominal_noise, 0.104)
        w2 = mrt_width(nominal_noise, 0.129)
        assert w2 / w1 == pytest.approx(1.2404, abs=1e-4)

    def test_table_prediction_range(self, nominal_noise):
        # predicted W/h spans 0.048-0.059 GHz over the device current range
        assert mrt_width(nominal_noise, 0.104) == pytest.approx(0.048, rel=0.15)
        assert mrt_width(nominal_noise, 0.129) == pytest.approx(0.059, rel=0.15)

    def test_amplitude_scaling(self, nominal_noise):
        import dataclasses

        nm4 = dataclasses.replace(nominal_noise, a_star=4.0 * nominal_noise.a_star)
        assert mrt_width(nm4, 0.115) == pytest.approx(
            2.0 * mrt_width(nominal_noise, 0.115), rel=1e-9
        )

    def test_monotonicity(self, nominal_noise):
        import dataclasses

        base = mrt_width(nominal_noise, 0.115)
        assert mrt_width(nominal_noise, 0.116) > base
        up = dataclasses.replace(nominal_noise, a_star=1.1 * nominal_noise.a_star)
        assert mrt_width(up, 0.115) > base
        wide = dataclasses.replace(
            nominal_noise, omega_high_mrt=1.5 * nominal_noise.omega_high_mrt
        )
        assert mrt_width(wide, 0.115) > base

    def test_quadrature_refinement(self, nominal_noise):
        w_a = mrt_width(nominal_noise, 0.115, rtol=1e-8)
        w_b = mrt_width(nominal_noise, 0.115, rtol=5e-9)
        assert abs(w_a - w_b) / w_b < 1e-3

    def test_rejects_bad_ip(self, nominal_noise):
        with pytest.raises(ValueError):
            mrt_width(nominal_noise, 0.0)


class TestReorganizationEnergy:
    def test_positive_and_quadratic_in_ip(self, nominal_noise):
        e1 = reorganization_energy_integral(nominal_noise, 0.104)
        e2 = reorganization_energy_integral(nominal_noise, 0.208)
        assert e1 > 0.0
        assert e2 == pytest.approx(4.0 * e1, rel=1e-9)

    def test_power_law_oracle_at_alpha_one(self):
        # alpha = 1: integrand A/w is integrable in closed form
        nm = NoiseModel(alpha=1.0)
        i_p = 0.115
        w_lo = nm.omega_low_mrt * 1e9
        w_hi = nm.omega_high_mrt * 1e9
        integral = nm.a_amp * math.log(w_hi / w_lo) / CONSTANTS.hbar
        expected = (
            2.0
            * (i_p * 1e-6 * CONSTANTS.flux_quantum) ** 2
            * integral
            / TWO_PI
            / CONSTANTS.planck
            * 1e-9
        )
        got = reorganization_energy_integral(nm, i_p)
        assert got == pytest.approx(expected, rel=1e-6)


class TestFdt:
    def test_invariant_exact(self, nominal_noise):
        params = mrt_params_fdt(nominal_noise, 0.115)
        expected = params.w**2 / (2.0 * thermal_energy(nominal_noise.temperature))
        assert params.epsilon_p == pytest.approx(expected, rel=1e-12)

    def test_spec_arithmetic(self):
        # W/h = 0.050 GHz at 20 mK
        ep = 0.050**2 / (2.0 * thermal_energy(0.020))
        assert ep == pytest.approx(0.0029995, abs=1e-6)

    def test_w_scale_quadratic(self, nominal_noise):
        p1 = mrt_params_fdt(nominal_noise, 0.115)
        p4 = mrt_params_fdt(nominal_noise, 0.115, w_scale=4.0)
        assert p4.w == pytest.approx(4.0 * p1.w, rel=1e-12)
        assert p4.epsilon_p == pytest.approx(16.0 * p1.epsilon_p, rel=1e-12)

    def test_integral_within_half_of_fdt(self, nominal_noise):
        params = mrt_params_fdt(nominal_noise, 0.115)
        integral = reorganization_energy_integral(nominal_noise, 0.115)
        deviation = abs(integral - params.epsilon_p) / params.epsilon_p
        assert deviation <= 0.5

    def test_mrt_params_validation(self):
        with pytest.raises(ValueError):
            MrtParams(w=0.0, epsilon_p=0.001)
        with pytest.raises(ValueError):
            MrtParams(w=0.05, epsilon_p=-0.001)

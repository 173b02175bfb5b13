import math

import numpy as np
import pytest

from lzx.device import (
    OperatingPoint,
    SweepSchedule,
    default_operating_table,
    dimensionless_time,
    epsilon_at,
    gap_at,
    hamiltonian_at,
    interpolate_operating_point,
    load_operating_table,
    save_operating_table,
    sweep_velocity,
)


def make_schedule(delta=0.05, i_p=0.125, phi_init=-0.005, phi_final=0.005, t_lz=100.0):
    return SweepSchedule(
        point=OperatingPoint(phi_x=0.2, delta=delta, i_p=i_p),
        phi_init=phi_init,
        phi_final=phi_final,
        t_lz=t_lz,
    )


class TestOperatingPoint:
    def test_validation(self):
        with pytest.raises(ValueError):
            OperatingPoint(phi_x=0.2, delta=0.0, i_p=0.1)
        with pytest.raises(ValueError):
            OperatingPoint(phi_x=0.2, delta=0.05, i_p=-0.1)


class TestSweepSchedule:
    def test_must_cross_symmetry_point(self):
        with pytest.raises(ValueError):
            make_schedule(phi_init=0.001)
        with pytest.raises(ValueError):
            make_schedule(phi_final=-0.001)

    def test_duration_positive(self):
        with pytest.raises(ValueError):
            make_schedule(t_lz=0.0)

    def test_endpoint_guard(self):
        # |eps| at +-0.005 is 3.9 GHz; delta=0.5 puts the guard below 10
        with pytest.raises(ValueError):
            make_schedule(delta=0.5)
        with pytest.warns(UserWarning):
            make_schedule(delta=0.12)


class TestEpsilonAt:
    def test_symmetric_midpoint(self):
        s = make_schedule()
        assert epsilon_at(s, s.t_lz / 2.0) == pytest.approx(0.0, abs=1e-12)

    def test_start_value(self):
        s = make_schedule()
        assert epsilon_at(s, 0.0) == pytest.approx(-3.9009, abs=1e-4)

    def test_asymmetric_endpoint(self):
        s = make_schedule(phi_init=-3.1e-3, phi_final=6.9e-3)
        assert epsilon_at(s, s.t_lz) == pytest.approx(5.3833, abs=1e-4)

    def test_domain(self):
        s = make_schedule()
        with pytest.raises(ValueError):
            epsilon_at(s, -1.0)
        with pytest.raises(ValueError):
            epsilon_at(s, s.t_lz + 1.0)

    def test_affine_in_time(self, rng):
        s = make_schedule()
        for _ in range(50):
            t = rng.uniform(0.0, s.t_lz - 2.0)
            h = rng.uniform(0.01, 1.0)
            second = epsilon_at(s, t) - 2.0 * epsilon_at(s, t + h) + epsilon_at(s, t + 2 * h)
            assert abs(second) < 1e-12


class TestHamiltonian:
    def test_hermitian_traceless_random(self, rng):
        for _ in range(1000):
            s = make_schedule(
                delta=rng.uniform(0.012, 0.2),
                i_p=rng.uniform(0.1, 0.13),
                t_lz=rng.uniform(10.0, 1000.0),
            )
            t = rng.uniform(0.0, s.t_lz)
            h = hamiltonian_at(s, t)
            assert np.allclose(h, h.conj().T, atol=1e-14)
            assert abs(np.trace(h)) < 1e-14

    def test_symmetry_point(self):
        s = make_schedule(delta=0.08)
        h = hamiltonian_at(s, s.t_lz / 2.0)
        assert h[0, 1] == pytest.approx(-0.04)
        evals = np.linalg.eigvalsh(h)
        assert evals == pytest.approx([-0.04, 0.04])

    def test_near_diagonal_limit(self):
        s = make_schedule(delta=1e-9)
        h = hamiltonian_at(s, 0.0)
        eps = epsilon_at(s, 0.0)
        assert h[0, 0] == pytest.approx(-eps / 2.0, rel=1e-12)
        assert h[1, 1] == pytest.approx(eps / 2.0, rel=1e-12)
        assert abs(h[0, 1]) == pytest.approx(5e-10)

    def test_gap_matches_eigensolver(self, rng):
        s = make_schedule()
        for _ in range(20):
            t = rng.uniform(0.0, s.t_lz)
            evals = np.linalg.eigvalsh(hamiltonian_at(s, t))
            assert evals[1] - evals[0] == pytest.approx(gap_at(s, t), rel=1e-12)

    def test_gap_minimized_at_crossing(self):
        s = make_schedule()
        t_cross = s.t_lz / 2.0
        assert gap_at(s, t_cross) == pytest.approx(s.point.delta, rel=1e-12)
        for t in (0.0, 0.3 * s.t_lz, 0.7 * s.t_lz, s.t_lz):
            assert gap_at(s, t) >= gap_at(s, t_cross)


class TestSweepVelocity:
    def test_halves_when_duration_doubles(self):
        v1 = sweep_velocity(make_schedule(t_lz=100.0))
        v2 = sweep_velocity(make_schedule(t_lz=200.0))
        assert v2 == pytest.approx(v1 / 2.0, rel=1e-12)

    def test_value(self):
        assert sweep_velocity(make_schedule()) == pytest.approx(0.078019, abs=1e-6)

    def test_times_duration_is_span(self):
        s = make_schedule(phi_init=-0.003, phi_final=0.007, t_lz=173.0)
        span = epsilon_at(s, s.t_lz) - epsilon_at(s, 0.0)
        assert sweep_velocity(s) * s.t_lz == pytest.approx(span, rel=1e-12)


class TestDimensionlessTime:
    def test_doubles_with_duration(self):
        t1 = dimensionless_time(make_schedule(t_lz=100.0))
        t2 = dimensionless_time(make_schedule(t_lz=200.0))
        assert t2 == pytest.approx(2.0 * t1, rel=1e-12)

    def test_value(self):
        assert dimensionless_time(make_schedule()) == pytest.approx(0.20133, abs=1e-5)

    def test_vanishes_with_gap(self):
        s = make_schedule(delta=1e-9)
        assert dimensionless_time(s) < 1e-15


class TestInterpolation:
    def table(self):
        return [
            OperatingPoint(phi_x=0.18, delta=0.012, i_p=0.129),
            OperatingPoint(phi_x=0.25, delta=0.120, i_p=0.104),
        ]

    def test_node_identity(self):
        table = default_operating_table()
        for p in table:
            q = interpolate_operating_point(table, p.phi_x)
            assert q.delta == pytest.approx(p.delta, rel=1e-12)
            assert q.i_p == pytest.approx(p.i_p, rel=1e-12)

    def test_log_linear_midpoint(self):
        q = interpolate_operating_point(self.table(), 0.215)
        assert q.delta == pytest.approx(0.037947, abs=1e-6)
        assert q.i_p == pytest.approx(0.1165, abs=1e-6)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            interpolate_operating_point(self.table(), 0.3)

    def test_needs_sorted_table(self):
        with pytest.raises(ValueError):
            interpolate_operating_point(self.table()[::-1], 0.2)

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            interpolate_operating_point(self.table()[:1], 0.18)


class TestDefaultTable:
    def test_ranges_and_monotonicity(self):
        table = default_operating_table()
        assert len(table) == 8
        deltas = [p.delta for p in table]
        ips = [p.i_p for p in table]
        assert deltas[0] == pytest.approx(0.012)
        assert deltas[-1] == pytest.approx(0.120)
        # delta strictly decreasing as phi_x decreases
        assert all(b > a for a, b in zip(deltas, deltas[1:]))
        assert all(b < a for a, b in zip(ips, ips[1:]))
        assert min(ips) == pytest.approx(0.104)
        assert max(ips) == pytest.approx(0.129)


class TestTableFile:
    def test_roundtrip(self, tmp_path):
        table = default_operating_table()
        path = tmp_path / "points.csv"
        save_operating_table(table, path)
        assert path.read_text().startswith("phi_x,delta_GHz,ip_uA\n")
        back = load_operating_table(path)
        assert back == table

    def test_header_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            load_operating_table(path)

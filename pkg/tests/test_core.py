import numpy as np
import pytest

from waverelax.core import (
    Discretization,
    IterationHistory,
    IterationRecord,
    SpaceTimeField,
    StabilityError,
    TimeTrace,
    WaveProblem,
    concatenate,
    error_linf_l2,
    l2_space,
)


def make_field(values, x_left=0.0, dx=0.1, dt=0.1):
    return SpaceTimeField(np.asarray(values, dtype=float), x_left=x_left, dx=dx, dt=dt)


class TestL2Space:
    def test_zero_field(self):
        assert l2_space([0.0, 0.0, 0.0], 0.1) == 0.0

    def test_three_four_five(self):
        assert l2_space([3.0, 4.0], 1.0) == pytest.approx(5.0, abs=1e-15)

    def test_sine_riemann_sum(self):
        # integral of sin^2(pi x) over (0,1) is 1/2, so the norm -> sqrt(1/2)
        x = np.linspace(0.0, 1.0, 1001)
        val = l2_space(np.sin(np.pi * x), 1.0 / 1000)
        assert abs(val - np.sqrt(0.5)) <= 1e-3

    def test_empty_is_usage_error(self):
        with pytest.raises(ValueError):
            l2_space([], 0.1)

    def test_homogeneity_and_triangle(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n = rng.integers(1, 50)
            v = rng.normal(size=n)
            w = rng.normal(size=n)
            alpha = rng.normal()
            dx = float(rng.uniform(0.01, 1.0))
            assert l2_space(alpha * v, dx) == pytest.approx(abs(alpha) * l2_space(v, dx), rel=1e-12)
            assert l2_space(v + w, dx) <= l2_space(v, dx) + l2_space(w, dx) + 1e-12


class TestErrorLinfL2:
    def test_identical_fields(self):
        u = make_field(np.arange(12.0).reshape(3, 4))
        assert error_linf_l2(u, u) == 0.0

    def test_single_node_difference(self):
        a = np.zeros((4, 5))
        b = a.copy()
        b[2, 3] = 1.0
        assert error_linf_l2(make_field(a, dx=0.04), make_field(b, dx=0.04)) == pytest.approx(0.2)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            error_linf_l2(make_field(np.zeros((3, 4))), make_field(np.zeros((3, 5))))

    def test_zero_iff_identical(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(5, 7))
        u = make_field(a)
        v = make_field(a.copy())
        assert error_linf_l2(u, v) == 0.0
        bumped = a.copy()
        bumped[1, 1] += 1e-14
        assert error_linf_l2(u, make_field(bumped)) > 0.0


class TestConcatenate:
    def test_zero_fields(self):
        u1 = make_field(np.zeros((3, 4)), x_left=0.0, dx=0.1)
        u2 = make_field(np.zeros((3, 5)), x_left=0.3, dx=0.1)
        joined, disc = concatenate(u1, u2)
        assert disc == 0.0
        assert joined.n_nodes == 8
        assert np.all(joined.values == 0.0)

    def test_exact_interface_agreement(self):
        rng = np.random.default_rng(5)
        a = rng.normal(size=(4, 6))
        b = rng.normal(size=(4, 3))
        b[:, 0] = a[:, -1]
        u1 = make_field(a, x_left=-0.5, dx=0.1)
        u2 = make_field(b, x_left=0.0, dx=0.1)
        joined, disc = concatenate(u1, u2)
        assert disc == 0.0
        # left-side owner wins at the shared node
        assert np.array_equal(joined.values[:, 5], a[:, -1])

    def test_coordinate_mismatch(self):
        u1 = make_field(np.zeros((3, 4)), x_left=0.0, dx=0.1)
        u2 = make_field(np.zeros((3, 4)), x_left=0.35, dx=0.1)
        with pytest.raises(ValueError):
            concatenate(u1, u2)

    def test_restriction_roundtrip(self):
        rng = np.random.default_rng(11)
        a = rng.normal(size=(4, 6))
        b = rng.normal(size=(4, 3))
        u1 = make_field(a, x_left=0.0, dx=0.1)
        u2 = make_field(b, x_left=0.5, dx=0.1)
        joined, _ = concatenate(u1, u2)
        left = joined.restrict(0.0, 0.5)
        right = joined.restrict(0.5, 0.7)
        assert np.array_equal(left.values, a)
        # away from the interface node the right restriction matches u2
        assert np.array_equal(right.values[:, 1:], b[:, 1:])


class TestTypes:
    def test_wave_problem_validation(self):
        with pytest.raises(ValueError):
            WaveProblem(x_left=0.0, x_right=1.0, interface=1.5, wave_speed=1.0)
        with pytest.raises(ValueError):
            WaveProblem(x_left=0.0, x_right=1.0, interface=0.5, wave_speed=-1.0)
        p = WaveProblem(x_left=-3.0, x_right=2.0, interface=0.0, wave_speed=1.0)
        assert p.a == 3.0 and p.b == 2.0

    def test_discretization_cfl_guard(self):
        with pytest.raises(StabilityError):
            Discretization.for_speed(dx=0.1, dt=0.2, n_time=5, wave_speed=1.0)
        d = Discretization.for_speed(dx=0.1, dt=0.1, n_time=5, wave_speed=1.0)
        assert d.lam == pytest.approx(1.0)
        assert d.t_final == pytest.approx(0.5)

    def test_trace_length_invariant(self):
        tr = TimeTrace(np.zeros(11), 0.1)
        assert tr.n_time == 10
        with pytest.raises(ValueError):
            TimeTrace(np.zeros(1), 0.1)

    def test_field_is_immutable(self):
        u = make_field(np.zeros((3, 4)))
        with pytest.raises(ValueError):
            u.values[0, 0] = 1.0

    def test_history_indices_must_increase_from_one(self):
        IterationHistory((IterationRecord(1, 1.0, 1.0), IterationRecord(2, 0.5, 0.5)))
        with pytest.raises(ValueError):
            IterationHistory((IterationRecord(2, 1.0, 1.0),))

    def test_history_iterations_to(self):
        h = IterationHistory(
            (IterationRecord(1, 1.0, 1.0), IterationRecord(2, 1e-11, 0.0))
        )
        assert h.iterations_to(1e-10) == 2
        assert h.iterations_to(1e-12) is None

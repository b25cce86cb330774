import math
import random

import pytest

from powerreg.controller import IntegralController, gain, tracking_error
from powerreg.freqset import DEFAULT_OMEGA

# Plant-shaped cubic used as a static test plant: increasing over the whole
# operating range, coefficients from the default simulated part at alpha=1.
A, B, C, D = 0.08, 0.48, 1.02, 0.9


def g(u):
    return ((A * u + B) * u + C) * u + D


def dg(u):
    return (3.0 * A * u + 2.0 * B) * u + C


def newton_reference(target, u0, steps):
    """Independently coded textbook Newton iteration for target - g(u) = 0."""
    us = [u0]
    for _ in range(steps):
        u = us[-1]
        us.append(u - (g(u) - target) / dg(u))
    return us


class TestGain:
    def test_reciprocal(self):
        assert gain(4.0, 0.1) == 0.25

    def test_zero_estimate_clamps_to_floor(self):
        assert gain(0.0, 0.1) == pytest.approx(10.0)

    def test_negative_estimate_clamps_to_floor(self):
        assert gain(-2.0, 0.1) == pytest.approx(10.0)

    def test_always_positive_and_bounded(self):
        rng = random.Random(5)
        for _ in range(1000):
            a = gain(rng.uniform(-50.0, 50.0), 0.1)
            assert 0.0 < a <= 10.0

    def test_rejects_non_finite_estimate(self):
        with pytest.raises(ValueError):
            gain(float("nan"), 0.1)

    def test_rejects_bad_floor(self):
        with pytest.raises(ValueError):
            gain(1.0, 0.0)
        with pytest.raises(ValueError):
            gain(1.0, -1.0)


class TestTrackingError:
    def test_basic(self):
        assert tracking_error(10.0, 8.0) == 2.0

    def test_zero(self):
        assert tracking_error(10.0, 10.0) == 0.0

    def test_negative_when_over_target(self):
        # a 5 W target against a 7.749 W starting measurement
        assert tracking_error(5.0, 7.749) == pytest.approx(-2.749)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            tracking_error(float("inf"), 1.0)


class TestStep:
    def test_quarter_gain_step_lands_on_level(self):
        ctrl = IntegralController(DEFAULT_OMEGA, u0=2.0)
        u = ctrl.step(target=10.0, y_prev=8.0, deriv_estimate=4.0)
        assert u == 2.5
        assert u in DEFAULT_OMEGA
        assert ctrl.u_prev == 2.5
        assert ctrl.e_prev == 2.0

    def test_zero_error_is_fixed_point(self):
        ctrl = IntegralController(DEFAULT_OMEGA, u0=2.0)
        assert ctrl.step(10.0, 10.0, 4.0) == 2.0

    def test_state_unchanged_on_bad_input(self):
        ctrl = IntegralController(DEFAULT_OMEGA, u0=2.0)
        ctrl.step(10.0, 8.0, 4.0)
        u_prev, e_prev = ctrl.u_prev, ctrl.e_prev
        with pytest.raises(ValueError):
            ctrl.step(10.0, float("nan"), 4.0)
        with pytest.raises(ValueError):
            ctrl.step(float("inf"), 8.0, 4.0)
        assert ctrl.u_prev == u_prev
        assert ctrl.e_prev == e_prev

    def test_cube_root_iteration_converges(self):
        # continuous frequencies, plant y = u^3, exact derivative: the loop is
        # the Newton iteration for u^3 = 8 and must land on u = 2
        ctrl = IntegralController(None, u0=1.0)
        cube, dcube = (lambda u: u**3), (lambda u: 3.0 * u * u)
        u = 1.0
        for _ in range(30):
            u = ctrl.step(8.0, cube(u), dcube(u))
        assert u == pytest.approx(2.0, abs=1e-12)
        assert abs(8.0 - cube(u)) < 1e-9

    def test_cube_root_iterates_match_reference_newton(self):
        ctrl = IntegralController(None, u0=1.0)
        expected = 1.0
        u = 1.0
        for _ in range(12):
            expected = expected - (expected**3 - 8.0) / (3.0 * expected**2)
            u = ctrl.step(8.0, u**3, 3.0 * u * u)
            assert u == pytest.approx(expected, rel=1e-13)


class TestReset:
    def test_reset_to_levels(self):
        ctrl = IntegralController(DEFAULT_OMEGA, u0=2.0)
        ctrl.step(10.0, 8.0, 4.0)
        ctrl.reset(0.8)
        assert ctrl.u_prev == 0.8
        assert ctrl.e_prev == 0.0
        ctrl.reset(2.0)
        assert ctrl.u_prev == 2.0

    def test_reset_off_ladder_rejected(self):
        ctrl = IntegralController(DEFAULT_OMEGA, u0=2.0)
        with pytest.raises(ValueError):
            ctrl.reset(0.9)

    def test_continuous_reset_accepts_any_positive(self):
        ctrl = IntegralController(None, u0=2.0)
        ctrl.reset(0.9)
        assert ctrl.u_prev == 0.9


class TestNewtonBehavior:
    def test_matches_reference_to_machine_precision(self):
        ctrl = IntegralController(None, u0=2.0)
        ref = newton_reference(10.0, 2.0, 10)
        u = 2.0
        for expected in ref[1:]:
            u = ctrl.step(10.0, g(u), dg(u))
            assert u == pytest.approx(expected, rel=1e-14)

    def test_geometric_contraction_with_exact_derivative(self):
        ctrl = IntegralController(None, u0=2.0)
        u = 2.0
        err = abs(10.0 - g(u))
        steps = 0
        while err > 1e-9:
            u = ctrl.step(10.0, g(u), dg(u))
            new_err = abs(10.0 - g(u))
            assert new_err < 0.8 * err
            err = new_err
            steps += 1
            assert steps <= 20

    def test_converges_despite_derivative_errors(self):
        # relative derivative error up to 0.5 in magnitude, random sign
        rng = random.Random(42)
        ctrl = IntegralController(None, u0=2.0)
        u = 2.0
        for _ in range(60):
            deriv = dg(u) * (1.0 + rng.uniform(-0.5, 0.5))
            u = ctrl.step(10.0, g(u), deriv)
        assert abs(10.0 - g(u)) < 1e-6

    def test_recovers_from_transient_negative_estimates(self):
        # floor-clamped gain on early garbage estimates must not prevent
        # convergence once estimates become sane
        ctrl = IntegralController(None, u0=2.0)
        u = 2.0
        for k in range(40):
            deriv = -1.0 if k < 2 else dg(u)
            u = ctrl.step(10.0, g(u), deriv)
        assert abs(10.0 - g(u)) < 1e-6

    def test_quantized_loop_enters_short_cycle(self):
        # with projection on, the loop must end in a cycle over at most two
        # adjacent levels
        ctrl = IntegralController(DEFAULT_OMEGA, u0=0.8)
        u = 0.8
        seq = []
        for _ in range(80):
            u = ctrl.step(6.8, g(u), dg(u))
            seq.append(u)
        tail = seq[-20:]
        assert all(tail[i] == tail[i + 2] for i in range(len(tail) - 2))
        distinct = sorted(set(tail))
        assert len(distinct) <= 2
        if len(distinct) == 2:
            levels = DEFAULT_OMEGA.levels
            assert levels.index(distinct[1]) - levels.index(distinct[0]) == 1


class TestRawStateVariant:
    def test_raw_accumulator_still_converges(self):
        ctrl = IntegralController(DEFAULT_OMEGA, u0=0.8, projected_state=False)
        u = 0.8
        for _ in range(80):
            u = ctrl.step(6.8, g(u), dg(u))
        assert u in DEFAULT_OMEGA
        assert abs(6.8 - g(u)) < 1.0

    def test_variants_differ_only_via_shadow_state(self):
        proj = IntegralController(DEFAULT_OMEGA, u0=2.0, projected_state=True)
        raw = IntegralController(DEFAULT_OMEGA, u0=2.0, projected_state=False)
        # one step from a common state is identical
        assert proj.step(10.0, 8.0, 4.0) == raw.step(10.0, 8.0, 4.0)


def test_invalid_u0_rejected():
    with pytest.raises(ValueError):
        IntegralController(DEFAULT_OMEGA, u0=0.9)
    with pytest.raises(ValueError):
        IntegralController(None, u0=-1.0)
    with pytest.raises(ValueError):
        IntegralController(None, u0=math.nan)

import cvxpy as cp
import numpy as np
import pytest

from channel.services.channel_service import ChannelService
from covertness.services.detection_service import DetectionService
from surrogate.services.surrogate_service import SurrogateService
from utils.exceptions import AnchorDomainError


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def linearization(small_scenario, rng):
    N, M = small_scenario.N, small_scenario.M
    points = np.linspace(small_scenario.q_start, small_scenario.q_end, N)
    w_b = 0.3 * (rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M)))
    w_c = 0.8 * (rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M)))
    return SurrogateService.linearize_trajectory(small_scenario, points, w_b, w_c)


class TestAlignedPowerBound:
    def test_mrt_meets_bound(self):
        q, u = (100.0, 50.0), (400.0, 300.0)
        h = ChannelService.channel_gain(q, u, 100.0, 8, 0.5, 1e-3)
        w = 0.7 * ChannelService.steering_vector(q, u, 100.0, 8, 0.5).entries
        exact = abs(np.vdot(h.entries, w)) ** 2
        assert SurrogateService.aligned_power_bound(w, h.source_distance, 1e-3) == pytest.approx(exact, rel=1e-12)

    def test_bound_dominates_random_beams(self, rng):
        for _ in range(1000):
            q, u = rng.uniform(0, 1000, size=(2, 2))
            h = ChannelService.channel_gain(q, u, 100.0, 6, 0.5, 1e-3)
            w = rng.standard_normal(6) + 1j * rng.standard_normal(6)
            exact = abs(np.vdot(h.entries, w)) ** 2
            assert SurrogateService.aligned_power_bound(w, h.source_distance, 1e-3) >= exact * (1 - 1e-12)

    def test_single_entry_is_exact(self):
        h = ChannelService.channel_gain((0.0, 0.0), (30.0, 40.0), 100.0, 4, 0.5, 1e-3)
        w = np.array([0.0, 0.0, 2.0j, 0.0])
        exact = abs(np.vdot(h.entries, w)) ** 2
        assert SurrogateService.aligned_power_bound(w, h.source_distance, 1e-3) == pytest.approx(exact, rel=1e-12)


class TestTrajectorySurrogates:
    def test_anchor_matches_bound(self, linearization):
        check_b, check_c = SurrogateService.traj_rate_surrogates(linearization, linearization.j_b, linearization.j_c)
        bound_b, bound_c = SurrogateService.traj_rate_bounds(linearization)
        np.testing.assert_allclose(check_b, bound_b, atol=1e-9)
        np.testing.assert_allclose(check_c, bound_c, atol=1e-9)

    def test_surrogate_below_bound(self, linearization, rng):
        for _ in range(1000):
            j_b = rng.uniform(0.0, 2e6, size=linearization.N)
            j_c = rng.uniform(0.0, 2e6, size=linearization.N)
            check_b, check_c = SurrogateService.traj_rate_surrogates(linearization, j_b, j_c)
            bound_b, bound_c = SurrogateService.traj_rate_bounds(linearization, j_b, j_c)
            assert np.all(check_b <= bound_b + 1e-12)
            assert np.all(check_c <= bound_c + 1e-12)

    def test_lower_slack_never_helps_beyond_distance(self, linearization, rng):
        j_b = linearization.j_b * 1.5
        j_lo = linearization.j_b * 1.2
        low, _ = SurrogateService.traj_rate_surrogates(linearization, j_b, linearization.j_c, j_b_lo=j_lo)
        full, _ = SurrogateService.traj_rate_surrogates(linearization, j_b, linearization.j_c)
        assert np.all(low <= full)

    def test_no_signal_is_nonpositive(self, small_scenario, rng):
        N, M = small_scenario.N, small_scenario.M
        points = np.linspace(small_scenario.q_start, small_scenario.q_end, N)
        lin = SurrogateService.linearize_trajectory(small_scenario, points, np.zeros((N, M)), np.ones((N, M)))
        check_b, _ = SurrogateService.traj_rate_surrogates(lin, lin.j_b * 3.0, lin.j_c)
        assert np.all(check_b <= 0.0)

    def test_bounds_match_exact_rates_for_mrt(self, small_scenario):
        N, M = small_scenario.N, small_scenario.M
        points = np.linspace(small_scenario.q_start, small_scenario.q_end, N)
        a_b = np.stack([
            ChannelService.steering_vector(q, small_scenario.u_b, small_scenario.H, M, 0.5).entries for q in points
        ])
        w_b = 0.5 * a_b
        lin = SurrogateService.linearize_trajectory(small_scenario, points, w_b, np.zeros((N, M)))
        rate_b, _ = ChannelService.slot_rates(small_scenario, points, w_b, np.zeros((N, M)))
        bound_b, _ = SurrogateService.traj_rate_bounds(lin)
        np.testing.assert_allclose(bound_b, rate_b, rtol=1e-10)


class TestSlackDistanceBound:
    def test_equal_at_anchor(self):
        assert SurrogateService.slack_distance_bound([3.0, 4.0], [3.0, 4.0], [0.0, 0.0]) == pytest.approx(25.0)

    def test_global_lower_bound(self, rng):
        for _ in range(1000):
            q, anchor, u = rng.uniform(-500, 500, size=(3, 2))
            assert SurrogateService.slack_distance_bound(q, anchor, u) <= np.sum((q - u) ** 2) + 1e-9

    def test_anchor_on_user(self):
        assert SurrogateService.slack_distance_bound([10.0, -4.0], [1.0, 1.0], [1.0, 1.0]) == 0.0

    def test_expression_matches_numeric(self, rng):
        q, anchor = rng.uniform(0, 100, size=(2, 5, 2))
        u = np.array([20.0, 70.0])
        numeric = SurrogateService.slack_distance_bound(q, anchor, u)
        symbolic = SurrogateService.slack_distance_bound(cp.Constant(q), anchor, u)
        np.testing.assert_allclose(symbolic.value, numeric, rtol=1e-12)


class TestSinrSurrogate:
    def test_equal_at_anchor(self):
        assert SurrogateService.sinr_rate_surrogate(0.2, 1.5, 0.2, 1.5) == pytest.approx(np.log2(1 + 1 / 0.3))

    def test_lower_bound(self, rng):
        for f, g, f0, g0 in np.exp(rng.uniform(-4, 4, size=(1000, 4))):
            assert SurrogateService.sinr_rate_surrogate(f, g, f0, g0) <= SurrogateService.sinr_rate(f, g) + 1e-12

    def test_decreasing_in_f(self):
        values = [SurrogateService.sinr_rate_surrogate(f, 1.0, 1.0, 1.0) for f in (1.0, 10.0, 100.0)]
        assert values[0] > values[1] > values[2]
        assert values[2] < 0.0

    def test_rejects_nonpositive_anchor(self):
        with pytest.raises(AnchorDomainError):
            SurrogateService.sinr_rate_surrogate(1.0, 1.0, 0.0, 1.0)

    def test_linearization_reproduces_exact_rates(self, small_scenario, rng):
        N, M = small_scenario.N, small_scenario.M
        points = np.linspace(small_scenario.q_start, small_scenario.q_end, N)
        w_b = 0.2 * (rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M)))
        w_c = rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M))
        lin = SurrogateService.rate_linearization(small_scenario, points, w_b, w_c)
        rate_b, rate_c = ChannelService.slot_rates(small_scenario, points, w_b, w_c)
        np.testing.assert_allclose(SurrogateService.sinr_rate(lin.f_b, lin.g_b), rate_b, rtol=1e-10)
        np.testing.assert_allclose(SurrogateService.sinr_rate(lin.f_c, lin.g_c), rate_c, rtol=1e-10)


class TestCovertnessHalfspace:
    def test_value_at_anchor(self):
        plane = SurrogateService.covertness_halfspace(1.0, 3.0, 0.1)
        assert plane.lhs(1.0, 3.0) == pytest.approx(DetectionService.upsilon(1.0, 3.0))

    def test_active_at_example_anchor(self):
        plane = SurrogateService.covertness_halfspace(1.0, 2.0, 0.25)
        assert plane.lhs(1.0, 2.0) == pytest.approx(0.25, abs=1e-15)
        assert plane.holds(1.0, 2.0, tol=1e-12)
        assert not plane.holds(1.2, 2.0)

    def test_exact_along_anchor_ray(self):
        plane = SurrogateService.covertness_halfspace(0.5, 4.0, 0.1)
        for scale in (0.1, 2.0, 30.0):
            assert plane.lhs(0.5 * scale, 4.0 * scale) == pytest.approx(plane.value, abs=1e-12)

    def test_rejects_nonpositive_anchor(self):
        with pytest.raises(AnchorDomainError):
            SurrogateService.covertness_halfspace(0.0, 1.0, 0.1)

    def test_tangent_probe_reports(self):
        probe = SurrogateService.probe_covertness_tangent(grid=6, nearby=20, seed=1)
        assert probe.anchors == 30
        assert probe.samples == 600
        assert 0 <= probe.violations <= probe.samples


def central_difference(func, x, step):
    return (func(x + step) - func(x - step)) / (2.0 * step)


class TestSurrogateTangency:
    """Value and slope of each surrogate match its target at random anchors."""

    @pytest.fixture
    def anchors(self, small_scenario, rng):
        N, M = small_scenario.N, small_scenario.M
        out = []
        for _ in range(10):
            points = rng.uniform(-200.0, 1200.0, size=(N, 2))
            w_b = rng.uniform(0.05, 0.5) * (rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M)))
            w_c = rng.uniform(0.5, 2.0) * (rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M)))
            out.append(SurrogateService.linearize_trajectory(small_scenario, points, w_b, w_c))
        return out

    def test_trajectory_surrogates_touch_bounds(self, anchors):
        for lin in anchors:
            for n in range(lin.N):
                for key in ("b", "c"):
                    j_anchor = (lin.j_b if key == "b" else lin.j_c)[n]
                    step = 1e-4 * max(j_anchor, lin.H ** 2)

                    def shifted(j, source, key=key):
                        j_b, j_c = lin.j_b.copy(), lin.j_c.copy()
                        (j_b if key == "b" else j_c)[n] = j
                        pair = source(lin, j_b, j_c)
                        return pair[0 if key == "b" else 1][n]

                    value = shifted(j_anchor, SurrogateService.traj_rate_surrogates)
                    target = shifted(j_anchor, SurrogateService.traj_rate_bounds)
                    assert value == pytest.approx(target, abs=1e-10)

                    slope = central_difference(
                        lambda j: shifted(j, SurrogateService.traj_rate_surrogates), j_anchor, step
                    )
                    target_slope = central_difference(
                        lambda j: shifted(j, SurrogateService.traj_rate_bounds), j_anchor, step
                    )
                    assert slope == pytest.approx(target_slope, rel=1e-5, abs=1e-14)

    def test_sinr_surrogate_touches_rate(self, rng):
        for f0, g0 in np.exp(rng.uniform(-4.0, 4.0, size=(200, 2))):
            assert SurrogateService.sinr_rate_surrogate(f0, g0, f0, g0) == pytest.approx(
                SurrogateService.sinr_rate(f0, g0), abs=1e-12
            )
            for axis, anchor in ((0, f0), (1, g0)):
                step = 1e-5 * anchor

                def along(x, source, axis=axis):
                    f, g = (x, g0) if axis == 0 else (f0, x)
                    return float(source(f, g))

                slope = central_difference(
                    lambda x: along(x, lambda f, g: SurrogateService.sinr_rate_surrogate(f, g, f0, g0)), anchor, step
                )
                target = central_difference(lambda x: along(x, SurrogateService.sinr_rate), anchor, step)
                assert slope == pytest.approx(target, rel=1e-5)

    def test_normalized_surrogate_touches_rate(self, rng):
        for f0, g0 in np.exp(rng.uniform(-4.0, 4.0, size=(200, 2))):
            assert SurrogateService.normalized_rate_surrogate(1.0, 1.0, f0, g0) == pytest.approx(
                SurrogateService.sinr_rate(f0, g0), abs=1e-12
            )
            step = 1e-5
            slope_f = central_difference(
                lambda x: float(SurrogateService.normalized_rate_surrogate(x, 1.0, f0, g0)), 1.0, step
            )
            slope_g = central_difference(
                lambda x: float(SurrogateService.normalized_rate_surrogate(1.0, x, f0, g0)), 1.0, step
            )
            target_f = central_difference(lambda x: float(SurrogateService.sinr_rate(x * f0, g0)), 1.0, step)
            target_g = central_difference(lambda x: float(SurrogateService.sinr_rate(f0, x * g0)), 1.0, step)
            assert slope_f == pytest.approx(target_f, rel=1e-5)
            assert slope_g == pytest.approx(target_g, rel=1e-5)
            assert slope_f == pytest.approx(-SurrogateService.sinr_rate_slope(f0, g0), rel=1e-6)

    def test_normalized_surrogate_accepts_expressions(self):
        f_hat = cp.Constant(np.array([0.5, 2.0]))
        g_hat = cp.Constant(np.array([1.5, 0.8]))
        symbolic = SurrogateService.normalized_rate_surrogate(f_hat, g_hat, [0.3, 2.0], [1.2, 4.0])
        numeric = SurrogateService.normalized_rate_surrogate(
            np.array([0.5, 2.0]), np.array([1.5, 0.8]), [0.3, 2.0], [1.2, 4.0]
        )
        np.testing.assert_allclose(symbolic.value, numeric, rtol=1e-12)

import numpy as np
import pytest

from orchestrator.models import STATUS_CONVERGED, InitialPoint, RunOptions
from orchestrator.services.alternating_service import AlternatingService
from orchestrator.services.init_service import InitService
from scenarios.services.scenario_service import ScenarioService
from subproblems.services.feasibility_service import FeasibilityService
from utils.exceptions import InfeasibleError


def _final_report(result):
    residuals = FeasibilityService.residuals(
        result.scenario, result.trajectory, result.plan, result.schedule, result.serving, rates=result.rates
    )
    return FeasibilityService.report(residuals)


def test_fixed_point_stops_after_one_iteration(small_scenario):
    scenario = ScenarioService.with_overrides(small_scenario, S_b=0.0, block_order=["aoi"])
    init = InitService.init_point(scenario)
    result = AlternatingService.alternate(scenario, init)
    assert result.status == STATUS_CONVERGED
    assert len(result.iterations) == 2
    assert result.objective == pytest.approx(init.schedule.objective, abs=1e-12)
    np.testing.assert_array_equal(result.trajectory.points, init.trajectory.points)


def test_infeasible_start_is_rejected(small_scenario):
    init = InitService.init_point(small_scenario)
    loud = init.plan.with_beams(init.plan.w_b, 2.0 * init.plan.w_c)
    start = InitialPoint(
        trajectory=init.trajectory, plan=loud, schedule=init.schedule, serving=init.serving, rates=init.rates
    )
    with pytest.raises(InfeasibleError) as excinfo:
        AlternatingService.alternate(small_scenario, start)
    assert excinfo.value.binding == "power"


def test_record_of_initial_point(small_scenario):
    init = InitService.init_point(small_scenario)
    point, report = AlternatingService.evaluate(small_scenario, init.trajectory, init.plan, init.serving)
    row = AlternatingService.record(small_scenario, 0, point, report)
    assert row.objective == pytest.approx(init.schedule.objective)
    assert row.slack >= -1e-6 * (np.sum(small_scenario.need_c) + small_scenario.need_b)
    assert row.serving == len(init.serving)
    assert row.xi_star_mean == pytest.approx(1.0 - row.upsilon_mean)
    assert row.upsilon_mean <= small_scenario.epsilon + 1e-9


def test_aoi_block_offers_grown_schedule(small_scenario):
    init = InitService.init_point(small_scenario)
    candidates = AlternatingService.aoi_candidates(small_scenario, init, RunOptions())
    assert candidates[0][2] == init.serving
    for _, _, serving in candidates[1:]:
        assert set(init.serving.slots) < set(serving.slots)


def test_frozen_path_offers_no_trajectory_candidates(small_scenario):
    init = InitService.init_point(small_scenario)
    options = RunOptions.for_baseline("straight_line")
    assert AlternatingService.trajectory_candidates(small_scenario, init, options) == []


@pytest.mark.slow
class TestProposedDesign:
    @pytest.fixture
    def result(self, small_scenario):
        return AlternatingService.alternate(small_scenario, InitService.init_point(small_scenario))

    def test_objective_never_rises(self, result):
        trace = result.objective_trace
        assert all(later <= earlier + 1e-9 for earlier, later in zip(trace, trace[1:]))

    def test_final_point_is_feasible(self, result):
        report = _final_report(result)
        assert report.ok, report.residuals

    def test_guard_line_in_serving_slots(self, result):
        served = result.serving.mask(result.scenario.N)
        assert np.all(result.upsilon[served] <= result.scenario.epsilon + 1e-6)
        assert np.mean(result.xi_star[served]) >= 1.0 - result.scenario.epsilon - 1e-6

    def test_iteration_budget(self, result):
        assert len(result.iterations) - 1 <= result.scenario.max_outer_iters

    def test_endpoints_are_kept(self, result):
        np.testing.assert_array_equal(result.trajectory.points[0], result.scenario.q_start)
        np.testing.assert_array_equal(result.trajectory.points[-1], result.scenario.q_end)


@pytest.mark.slow
def test_runs_are_deterministic(small_scenario):
    first = AlternatingService.alternate(small_scenario, InitService.init_point(small_scenario))
    again = AlternatingService.alternate(small_scenario, InitService.init_point(small_scenario))
    assert first.iterations == again.iterations
    assert first.trajectory.points.tobytes() == again.trajectory.points.tobytes()
    assert first.plan.w_b.tobytes() == again.plan.w_b.tobytes()


@pytest.mark.slow
def test_desk_scale_run(default_scenario):
    scenario = ScenarioService.with_overrides(
        default_scenario, N=20, M=4, V_max=100.0, S_b=20e6, max_outer_iters=6
    )
    result = AlternatingService.alternate(scenario, InitService.init_point(scenario))
    trace = result.objective_trace
    assert all(later <= earlier + 1e-9 for earlier, later in zip(trace, trace[1:]))
    assert _final_report(result).ok

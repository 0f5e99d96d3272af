from types import SimpleNamespace

import numpy as np
import pytest

from channel.services.channel_service import ChannelService
from subproblems.models import Trajectory
from subproblems.services.aoi_service import AoiService
from subproblems.services.beamforming_service import BeamformingService
from subproblems.services.serving_service import ServingService


def build_point(scenario):
    """
    Straight line, probe beams, greedy serving slots and the matching AoI schedule.
    """
    trajectory = Trajectory(points=np.linspace(scenario.q_start, scenario.q_end, scenario.N))
    probe = BeamformingService.probe_plan(scenario, trajectory.points)
    probe_rates, _ = ChannelService.slot_rates(scenario, trajectory.points, probe.w_b, probe.w_c)
    serving = ServingService.select_serving_slots(scenario, probe_rates)
    mask = serving.mask(scenario.N)
    p_b = np.where(mask, probe.p_b, 0.0)
    plan = BeamformingService.mrt_plan(scenario, trajectory.points, p_b, scenario.Gamma - p_b)
    rates = ChannelService.slot_rates(scenario, trajectory.points, plan.w_b, plan.w_c)
    schedule = AoiService.solve_aoi_lp(*rates, scenario, serving, trajectory)
    return SimpleNamespace(
        scenario=scenario, trajectory=trajectory, plan=plan, serving=serving, schedule=schedule, rates=rates
    )


@pytest.fixture
def small_point(small_scenario):
    return build_point(small_scenario)

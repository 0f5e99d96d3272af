"""
Service for building the starting point of an optimization run.
"""

import logging

import numpy as np

from channel.services.channel_service import ChannelService
from orchestrator.models import InitialPoint
from subproblems.models import ServingSchedule, Trajectory
from subproblems.services.aoi_service import AoiService
from subproblems.services.beamforming_service import BeamformingService
from subproblems.services.serving_service import ServingService
from utils.exceptions import InfeasibleError
from utils.helpers import make_rng

logger = logging.getLogger(__name__)

# Random walks keep this share of the move budget
WALK_MARGIN = 1.0 - 1e-7


class InitService:
    """
    Service for initial trajectories, beams and ages.
    """

    @staticmethod
    def straight_line(scenario):
        """
        Uniform straight line from q_start to q_end.

        Args:
            scenario: Scenario

        Returns:
            Trajectory: N evenly spaced waypoints

        Raises:
            InfeasibleError: If the endpoints are too far apart for N slots at V_max
        """
        start = np.asarray(scenario.q_start, dtype=float)
        end = np.asarray(scenario.q_end, dtype=float)
        span = float(np.linalg.norm(end - start))
        if scenario.N == 1:
            if span > 0.0:
                raise InfeasibleError("a single slot cannot join distinct endpoints", binding="endpoints")
            return Trajectory(points=start.reshape(1, 2))

        step = span / (scenario.N - 1)
        if step > scenario.move_budget * (1.0 + 1e-9):
            logger.error(f"Endpoints {span:.1f} m apart need {step:.2f} m per slot; budget is {scenario.move_budget:.2f} m")
            raise InfeasibleError(
                f"q_end is unreachable in {scenario.N} slots at V_max={scenario.V_max}", binding="speed"
            )
        return Trajectory(points=np.linspace(start, end, scenario.N))

    @staticmethod
    def random_path(scenario, seed=None):
        """
        Seeded random walk that still reaches q_end within the speed limit.

        Each waypoint is drawn uniformly from the disc the UAV can reach in one
        slot, redrawn until q_end stays reachable in the slots left; after 100
        draws it steps straight toward q_end.

        Args:
            scenario: Scenario
            seed: Walk seed (defaults to the scenario seed)

        Returns:
            Trajectory: Random waypoints with fixed endpoints
        """
        line = InitService.straight_line(scenario)
        if scenario.N <= 2:
            return line
        seed = scenario.seed if seed is None else seed
        rng = make_rng(seed, 1)
        end = np.asarray(scenario.q_end, dtype=float)
        span = float(np.linalg.norm(end - np.asarray(scenario.q_start, dtype=float)))
        budget = max(scenario.move_budget * WALK_MARGIN, span / (scenario.N - 1))
        points = np.empty((scenario.N, 2))
        points[0] = scenario.q_start
        points[-1] = end

        for n in range(1, scenario.N - 1):
            current = points[n - 1]
            remaining = (scenario.N - 1 - n) * budget
            for _ in range(100):
                radius = budget * np.sqrt(rng.uniform())
                angle = rng.uniform(0.0, 2.0 * np.pi)
                candidate = current + radius * np.array([np.cos(angle), np.sin(angle)])
                if np.linalg.norm(candidate - end) <= remaining:
                    break
            else:
                gap = end - current
                distance = float(np.linalg.norm(gap))
                candidate = current if distance == 0.0 else current + gap * min(1.0, budget / distance)
            points[n] = candidate

        return Trajectory(points=points)

    @staticmethod
    def init_point(scenario, trajectory=None, covert=True, exclusive=False):
        """
        MRT beams at the probe split, greedy serving slots and one AoI solve.

        With ``exclusive`` the serving slots are picked from Bob's rates
        when he has the whole budget, and every slot carries one user only.

        Args:
            scenario: Scenario
            trajectory: Starting waypoints (the straight line by default)
            covert: Whether the covertness constraint applies
            exclusive: Whether slots are orthogonal between Bob and Carol

        Returns:
            InitialPoint: Feasible starting point

        Raises:
            InfeasibleError: If the endpoints are unreachable or the demands cannot be met
        """
        if trajectory is None:
            trajectory = InitService.straight_line(scenario)
        points = trajectory.points
        if exclusive:
            return InitService._exclusive_point(scenario, trajectory)
        probe = BeamformingService.probe_plan(scenario, points, covert)

        if scenario.need_b > 0 and not np.any(probe.p_b > 0.0):
            logger.warning("No covert-feasible power split in the request window; Bob gets no slots")
            serving = ServingSchedule()
        else:
            probe_rates, _ = ChannelService.slot_rates(scenario, points, probe.w_b, probe.w_c)
            serving = ServingService.select_serving_slots(scenario, probe_rates)

        p_b = np.where(serving.mask(scenario.N), probe.p_b, 0.0)
        plan = BeamformingService.mrt_plan(scenario, points, p_b, scenario.Gamma - p_b)
        rates = ChannelService.slot_rates(scenario, points, plan.w_b, plan.w_c)
        schedule = AoiService.solve_aoi_lp(*rates, scenario, serving, trajectory)
        logger.info(f"Initial point: total AoI {schedule.objective:.6f} s over {len(serving)} serving slots")
        return InitialPoint(trajectory=trajectory, plan=plan, schedule=schedule, serving=serving, rates=rates)

    @staticmethod
    def _exclusive_point(scenario, trajectory):
        points = trajectory.points
        window = np.zeros(scenario.N, dtype=bool)
        window[list(scenario.window_slots)] = True
        alone = BeamformingService.mrt_plan(scenario, points, np.where(window, scenario.Gamma, 0.0), 0.0)
        alone_rates, _ = ChannelService.slot_rates(scenario, points, alone.w_b, alone.w_c)
        serving = ServingService.select_serving_slots(scenario, alone_rates)

        plan = BeamformingService.exclusive_plan(scenario, points, serving)
        rates = ChannelService.slot_rates(scenario, points, plan.w_b, plan.w_c)
        schedule = AoiService.solve_aoi_lp(*rates, scenario, serving, trajectory, exclusive=True)
        logger.info(
            f"Initial orthogonal point: total AoI {schedule.objective:.6f} s, "
            f"Bob alone in {len(serving)} of {scenario.N} slots"
        )
        return InitialPoint(trajectory=trajectory, plan=plan, schedule=schedule, serving=serving, rates=rates)

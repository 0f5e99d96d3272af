"""
Service for the alternating optimization loop over the AoI, trajectory and beamforming blocks.
"""

import logging
import time

import numpy as np

from channel.services.channel_service import ChannelService
from covertness.services.detection_service import DetectionService
from orchestrator.models import (
    STATUS_CONVERGED,
    STATUS_MAX_ITERS,
    InitialPoint,
    IterationRecord,
    OptimizationResult,
    RunOptions,
)
from subproblems.services.aoi_service import AoiService
from subproblems.services.beamforming_service import BeamformingService
from subproblems.services.feasibility_service import FeasibilityService
from subproblems.services.serving_service import ServingService
from subproblems.services.trajectory_service import TrajectoryService
from utils.exceptions import AnchorDomainError, InfeasibleError, SolverError

logger = logging.getLogger(__name__)

BLOCK_ERRORS = (InfeasibleError, SolverError, AnchorDomainError)


class AlternatingService:
    """
    Service that runs the block-coordinate descent on the total AoI.

    Every block proposes candidate points; a candidate is re-timed by the AoI
    program with exact rates and accepted only if it is feasible for the
    exact constraints and does not raise the total AoI.
    """

    @staticmethod
    def evaluate(scenario, trajectory, plan, serving, covert=True, exclusive=False):
        """
        Exact rates, optimal ages and residuals of a trajectory/beam pair.

        Args:
            scenario: Scenario
            trajectory: Trajectory
            plan: BeamformerPlan
            serving: ServingSchedule
            covert: Whether the covertness constraint applies
            exclusive: Whether serving slots are closed to Carol

        Returns:
            tuple: (InitialPoint, FeasibilityReport)

        Raises:
            InfeasibleError: If the AoI program has no solution at these rates
        """
        rates = ChannelService.slot_rates(scenario, trajectory.points, plan.w_b, plan.w_c)
        schedule = AoiService.solve_aoi_lp(*rates, scenario, serving, trajectory, exclusive=exclusive)
        residuals = FeasibilityService.residuals(
            scenario, trajectory, plan, schedule, serving, covert=covert, rates=rates, exclusive=exclusive
        )
        point = InitialPoint(trajectory=trajectory, plan=plan, schedule=schedule, serving=serving, rates=rates)
        return point, FeasibilityService.report(residuals, tol=scenario.tol_feas)

    @staticmethod
    def aoi_candidates(scenario, point, options):
        """
        The current beams re-timed, and the same beams on a grown serving schedule.
        """
        candidates = [(point.trajectory, point.plan, point.serving)]
        if options.oma or scenario.need_b <= 0:
            return candidates

        points = point.trajectory.points
        probe = BeamformingService.probe_plan(scenario, points, options.covert)
        probe_rates, _ = ChannelService.slot_rates(scenario, points, probe.w_b, probe.w_c)
        try:
            grown = point.serving.union(ServingService.select_serving_slots(scenario, probe_rates))
        except InfeasibleError as e:
            logger.debug(f"No serving growth at this trajectory: {str(e)}")
            return candidates
        if grown != point.serving:
            plan = BeamformingService.seed_serving(scenario, points, point.plan, grown, options.covert)
            candidates.append((point.trajectory, plan, grown))
        return candidates

    @staticmethod
    def trajectory_candidates(scenario, point, options):
        """
        One SCA step, paired with realigned beams and with the unchanged beams.
        """
        if not options.design_trajectory:
            return []
        step = TrajectoryService.trajectory_sca_step(scenario, point.schedule, point.plan, point.trajectory)
        if step is point.trajectory:
            return []
        realigned = BeamformingService.realign_beams(scenario, step.points, point.plan)
        return [(step, realigned, point.serving), (step, point.plan, point.serving)]

    @staticmethod
    def beamforming_candidates(scenario, point, options):
        """
        One SDR step followed by rank-one recovery; orthogonal slots take full-power MRT.
        """
        points = point.trajectory.points
        if options.oma:
            plan = BeamformingService.exclusive_plan(scenario, points, point.serving)
            return [(point.trajectory, plan, point.serving)]
        anchor = BeamformingService.seed_serving(scenario, points, point.plan, point.serving, options.covert)
        lifted = BeamformingService.sdr_step(
            scenario, point.schedule, point.trajectory, anchor, point.serving, covert=options.covert
        )
        recovered = BeamformingService.recover_beams(scenario, point.trajectory, lifted, point.serving)
        return [(point.trajectory, recovered, point.serving)]

    @staticmethod
    def run_block(scenario, block, point, options):
        """
        Run one block and return the best acceptable candidate.

        Args:
            scenario: Scenario
            block: ``aoi``, ``trajectory`` or ``beamforming``
            point: Current iterate
            options: RunOptions

        Returns:
            tuple: (InitialPoint or None, FeasibilityReport or None)
        """
        propose = {
            "aoi": AlternatingService.aoi_candidates,
            "trajectory": AlternatingService.trajectory_candidates,
            "beamforming": AlternatingService.beamforming_candidates,
        }[block]
        try:
            candidates = propose(scenario, point, options)
        except BLOCK_ERRORS as e:
            logger.warning(f"Rejected {block} block: {str(e)}")
            return None, None

        current = point.schedule.objective
        best, best_report = None, None
        for trajectory, plan, serving in candidates:
            try:
                candidate, report = AlternatingService.evaluate(
                    scenario, trajectory, plan, serving, options.covert, options.oma
                )
            except InfeasibleError as e:
                logger.debug(f"{block} candidate has no feasible ages: {str(e)}")
                continue
            if not report.ok:
                logger.debug(f"{block} candidate violates {report.worst} by {report.worst_value:.3e}")
                continue
            objective = candidate.schedule.objective
            if objective > current + 1e-12 * max(1.0, current):
                continue
            if best is None or objective < best.schedule.objective:
                best, best_report = candidate, report

        if best is None and candidates:
            logger.warning(f"Rejected {block} block: no candidate keeps the point feasible without raising the total AoI")
        return best, best_report

    @staticmethod
    def record(scenario, iteration, point, report, accepted=(), flagged=()):
        """
        Build the iteration-log row of a point.

        Returns:
            IterationRecord: Log row
        """
        rate_b, rate_c = point.rates
        schedule = point.schedule
        slack = float(
            schedule.delta_c @ rate_c - np.sum(scenario.need_c) + schedule.delta_b @ rate_b - scenario.need_b
        )
        served = np.flatnonzero(point.serving.mask(scenario.N))
        upsilon, xi_star = 0.0, 1.0
        if served.size:
            p_b, p_c = point.plan.p_b[served], point.plan.p_c[served]
            upsilon = float(np.mean(DetectionService.upsilon(p_b, p_c)))
            xi_star = float(np.mean(DetectionService.xi_star(p_b, p_c)))
        return IterationRecord(
            iteration=iteration,
            objective=schedule.objective,
            slack=slack,
            accepted=tuple(accepted),
            worst=report.worst,
            worst_value=float(report.worst_value),
            upsilon_mean=upsilon,
            xi_star_mean=xi_star,
            serving=len(point.serving),
            flagged=tuple(flagged),
        )

    @staticmethod
    def alternate(scenario, init, options=None):
        """
        Alternate the blocks until the total AoI settles.

        Args:
            scenario: Scenario
            init: InitialPoint
            options: RunOptions (the proposed design by default)

        Returns:
            OptimizationResult: Final point and iteration log

        Raises:
            InfeasibleError: If the initial point violates an exact constraint
        """
        options = options or RunOptions()
        started = time.perf_counter()

        point, report = AlternatingService.evaluate(
            scenario, init.trajectory, init.plan, init.serving, options.covert, options.oma
        )
        if not report.ok:
            logger.error(f"Initial point violates {report.worst} by {report.worst_value:.3e}")
            raise InfeasibleError("initial point is not feasible", binding=report.worst)

        iterations = [AlternatingService.record(scenario, 0, point, report)]
        status = STATUS_MAX_ITERS

        for iteration in range(1, scenario.max_outer_iters + 1):
            previous = point.schedule.objective
            accepted, flagged = [], ()
            for block in scenario.block_order:
                candidate, candidate_report = AlternatingService.run_block(scenario, block, point, options)
                if candidate is None:
                    continue
                if block == "beamforming":
                    flagged = candidate.plan.flagged
                point, report = candidate, candidate_report
                accepted.append(block)

            row = AlternatingService.record(scenario, iteration, point, report, accepted, flagged)
            iterations.append(row)
            objective = point.schedule.objective
            logger.info(
                f"Iteration {iteration}: total AoI {objective:.6f} s, slack {row.slack:.4f} bit/Hz, "
                f"accepted {', '.join(accepted) or 'none'}"
            )
            if objective > previous + 1e-9:
                logger.error(f"Total AoI rose from {previous:.9f} to {objective:.9f} in iteration {iteration}")
            if abs(previous - objective) < scenario.tol_obj * scenario.N:
                status = STATUS_CONVERGED
                break

        wall_time = time.perf_counter() - started
        logger.info(f"Run finished ({status}) after {len(iterations) - 1} iterations in {wall_time:.1f} s")
        return OptimizationResult(
            scenario=scenario,
            baseline=options.baseline,
            trajectory=point.trajectory,
            plan=point.plan,
            schedule=point.schedule,
            serving=point.serving,
            rates=point.rates,
            iterations=iterations,
            status=status,
            wall_time=wall_time,
        )

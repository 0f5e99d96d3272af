"""
Service for the proposed design and its comparison baselines.
"""

import logging

from orchestrator.models import RunOptions
from orchestrator.services.alternating_service import AlternatingService
from orchestrator.services.init_service import InitService

logger = logging.getLogger(__name__)


class BaselineService:
    """
    Service that runs one optimization under a baseline's restrictions.
    """

    @staticmethod
    def run_baseline(scenario, baseline="noma", seed=None):
        """
        Run the alternating optimization for a baseline.

        ``straight_line`` and ``random_path`` freeze the trajectory so only the
        AoI and beamforming blocks run. ``no_covertness`` drops the covertness
        constraint. ``oma`` gives every slot to one user at full power.
        Bob-exclusive slots have no public signal to hide under, so their
        detection error is zero and the covertness loss shows in
        ``mean_xi_star`` instead of a constraint.

        Args:
            scenario: Scenario
            baseline: One of BASELINES
            seed: Seed of the random path (defaults to the scenario seed)

        Returns:
            OptimizationResult: Final point of the run

        Raises:
            InfeasibleError: If the baseline cannot meet the demands
            ValueError: If the baseline is unknown
        """
        options = RunOptions.for_baseline(baseline)
        logger.info(f"Running {baseline} on M={scenario.M}, N={scenario.N}, seed={scenario.seed}")
        if options.oma and scenario.need_b > 0:
            logger.warning("OMA serves Bob without public cover; his slots are exposed to the warden")

        trajectory = None
        if baseline == "random_path":
            trajectory = InitService.random_path(scenario, seed)
        init = InitService.init_point(scenario, trajectory, covert=options.covert, exclusive=options.oma)
        return AlternatingService.alternate(scenario, init, options)

"""
Service for the age-of-information linear program.
"""

import logging

import cvxpy as cp
import numpy as np

from conic.models import ConicProblem
from conic.services.solver_service import SolverService
from subproblems.models import AoiSchedule
from utils.exceptions import InfeasibleError

logger = logging.getLogger(__name__)


class AoiService:
    """
    Service that minimizes the total age over fixed rates, trajectory and serving slots.
    """

    @staticmethod
    def solve_aoi_lp(rate_b, rate_c, scenario, serving, trajectory, exclusive=False):
        """
        Minimize sum_n (Delta_b[n] + Delta_c[n]) for fixed per-slot rates.

        With ``exclusive`` the serving slots belong to Bob alone: Carol gets
        no packet there (Delta_c = 0) and her demand binds only in her own slots.

        Args:
            rate_b: Bob's exact rates per slot, bit/s/Hz
            rate_c: Carol's exact rates per slot, bit/s/Hz
            scenario: Scenario
            serving: ServingSchedule
            trajectory: Trajectory flown with these rates
            exclusive: Whether serving slots are closed to Carol

        Returns:
            AoiSchedule: Optimal ages; ``airtime`` is delta in every slot

        Raises:
            InfeasibleError: If a demand or a move cannot be met within one slot
        """
        rate_b = np.maximum(np.asarray(rate_b, dtype=float), 0.0)
        rate_c = np.maximum(np.asarray(rate_c, dtype=float), 0.0)
        N, delta = scenario.N, scenario.delta
        need_c, need_b = scenario.need_c, scenario.need_b
        serving_mask = serving.mask(N)
        carol_mask = ~serving_mask if exclusive else np.ones(N, dtype=bool)
        moves = trajectory.moves()

        AoiService._precheck(rate_b, rate_c, scenario, serving_mask, carol_mask, moves)

        problem = ConicProblem("aoi")
        delta_b = problem.real("delta_b", shape=(N,), nonneg=True)
        delta_c = problem.real("delta_c", shape=(N,), nonneg=True)
        airtime = problem.real("airtime", shape=(N,))
        problem.affine_le("slot_len_b", delta_b, delta)
        problem.affine_le("slot_len_c", delta_c, delta)
        problem.affine_le("airtime_b", delta_b, airtime)
        problem.affine_le("airtime_c", delta_c, airtime)
        problem.affine_le("airtime_max", airtime, delta)

        idle = np.flatnonzero(~serving_mask)
        if idle.size:
            problem.affine_eq("idle", delta_b[idle], 0.0)

        closed = np.flatnonzero(~carol_mask)
        if closed.size:
            problem.affine_eq("exclusive", delta_c[closed], 0.0)

        for n in np.flatnonzero(carol_mask):
            problem.affine_le(f"carol_qos[{n}]", float(need_c[n]) - float(rate_c[n]) * delta_c[n], 0.0)

        served = np.flatnonzero(serving_mask)
        if need_b > 0:
            problem.affine_le("bob_qos", need_b - rate_b[served] @ delta_b[served], 0.0)

        for n in range(N - 1):
            problem.affine_le(f"speed[{n}]", float(moves[n]), scenario.V_max * airtime[n])

        problem.minimize(cp.sum(delta_b) + cp.sum(delta_c))
        solution = SolverService.solve(problem, tol_feas=scenario.tol_feas)
        solution.raise_for_status()

        schedule = AoiService._polish(
            solution.value("delta_b"), rate_b, rate_c, scenario, serving_mask, carol_mask
        )
        logger.debug(f"AoI LP: objective {schedule.objective:.6f} over {N} slots, {served.size} serving")
        return schedule

    @staticmethod
    def _precheck(rate_b, rate_c, scenario, serving_mask, carol_mask, moves):
        delta = scenario.delta
        short = np.flatnonzero(carol_mask & (rate_c * delta < scenario.need_c))
        if short.size:
            n = int(short[0])
            raise InfeasibleError(
                f"Carol needs {scenario.need_c[n]:.4g} bit/Hz in slot {n} but gets "
                f"{rate_c[n] * delta:.4g} within one slot",
                binding=f"carol_qos[{n}]",
            )
        if scenario.need_b > 0 and np.sum(rate_b[serving_mask]) * delta < scenario.need_b:
            raise InfeasibleError(
                f"Bob's serving slots deliver at most {np.sum(rate_b[serving_mask]) * delta:.4g} "
                f"of {scenario.need_b:.4g} bit/Hz",
                binding="bob_qos",
            )
        budget = scenario.move_budget
        fast = np.flatnonzero(moves > budget * (1.0 + 1e-9) + 1e-9)
        if fast.size:
            n = int(fast[0])
            raise InfeasibleError(f"move {moves[n]:.3f} m exceeds {budget:.3f} m", binding=f"speed[{n}]")

    @staticmethod
    def _polish(delta_b, rate_b, rate_c, scenario, serving_mask, carol_mask):
        """
        Snap solver output onto the exact optimum structure.

        Carol's ages are need/rate in her slots and 0 elsewhere. Bob's are
        clipped to the slot, zeroed when idle, and topped up in
        descending-rate order if the solver left the demand short.
        """
        delta, N = scenario.delta, scenario.N
        need_c = scenario.need_c
        delta_c = np.clip(need_c / np.where(rate_c > 0, rate_c, np.inf), 0.0, delta)
        delta_c = np.where(carol_mask, delta_c, 0.0)

        if scenario.need_b > 0:
            delta_b = np.where(serving_mask, np.clip(np.asarray(delta_b, dtype=float), 0.0, delta), 0.0)
            short = scenario.need_b - float(rate_b @ delta_b)
            for n in sorted(np.flatnonzero(serving_mask), key=lambda k: (-rate_b[k], k)):
                if short <= 0 or rate_b[n] <= 0:
                    break
                extra = min(delta - delta_b[n], short / rate_b[n])
                delta_b[n] += extra
                short -= extra * rate_b[n]
        else:
            delta_b = np.zeros(N)

        return AoiSchedule(delta_b=delta_b, delta_c=delta_c, airtime=np.full(N, delta))

"""
Service for the trajectory block: one SCA step over the UAV waypoints.
"""

import logging

import cvxpy as cp
import numpy as np

from conic.models import ConicProblem
from conic.services.solver_service import SolverService
from subproblems.models import Trajectory
from surrogate.services.surrogate_service import SurrogateService

logger = logging.getLogger(__name__)


class TrajectoryService:
    """
    Service that moves the waypoints to raise the surrogate QoS throughput.
    """

    @staticmethod
    def trajectory_sca_step(scenario, schedule, plan, trajectory):
        """
        One convex restriction of the trajectory block around the current waypoints.

        Positions are scaled by the altitude H. Each user's squared distance
        enters through an upper slack (exact, ||q - u||^2 <= j_up) and a lower
        slack bounded by the distance tangent; the restriction contains the
        anchor, and the anchor is returned whenever the step would lower the
        surrogate throughput.

        Args:
            scenario: Scenario
            schedule: AoiSchedule fixing the ages and the per-slot airtime
            plan: BeamformerPlan fixing the aligned powers
            trajectory: Anchor Trajectory

        Returns:
            Trajectory: New waypoints with the endpoints held fixed

        Raises:
            InfeasibleError: If the restriction is infeasible
            SolverError: If the solver stops early
        """
        N, H = scenario.N, scenario.H
        anchor = np.asarray(trajectory.points, dtype=float)
        if scenario.V_max == 0.0 or N == 1:
            return trajectory

        lin = SurrogateService.linearize_trajectory(scenario, anchor, plan.w_b, plan.w_c)
        terms = SurrogateService.traj_rate_terms(lin)
        users = {"b": scenario.user("b"), "c": scenario.user("c")}
        anchor_j = {"b": lin.j_b, "c": lin.j_c}
        bound_b, bound_c = SurrogateService.traj_rate_bounds(lin)
        anchor_rates = {"b": bound_b, "c": bound_c}
        weights = {"b": np.asarray(schedule.delta_b, dtype=float), "c": np.asarray(schedule.delta_c, dtype=float)}

        problem = ConicProblem("trajectory")
        q = problem.real("q", shape=(N, 2))
        problem.affine_eq("start", q[0], np.asarray(scenario.q_start) / H)
        problem.affine_eq("end", q[N - 1], np.asarray(scenario.q_end) / H)
        reach = np.asarray(schedule.airtime[:-1], dtype=float) * scenario.V_max / H
        problem.soc("speed", reach, (q[1:] - q[:-1]).T, axis=0)

        gains = []
        for key in ("b", "c"):
            active = np.flatnonzero(weights[key] > 0)
            if active.size == 0:
                continue
            k = active.size
            u = users[key] / H
            j_up = problem.real(f"j_up_{key}", shape=(k,))
            j_lo = problem.real(f"j_lo_{key}", shape=(k,), nonneg=True)
            rate = problem.real(f"r_{key}", shape=(k,))
            offsets = q[active] - np.ones((k, 1)) @ u.reshape(1, 2)
            problem.quad_le(f"distance_up_{key}", offsets, j_up)
            problem.affine_le(
                f"distance_lo_{key}",
                j_lo,
                SurrogateService.slack_distance_bound(q[active], anchor[active] / H, u),
            )
            t = {name: values[active] for name, values in terms[key].items()}
            problem.log_le(
                f"rate_{key}",
                rate,
                [(1.0, t["gain"] + j_lo + 1.0)],
                affine=-t["base"] - cp.multiply(t["slope"], j_up - anchor_j[key][active] / H ** 2),
            )
            weight = weights[key][active]
            gains.append(weight @ rate)
            if key == "c":
                for i, n in enumerate(active):
                    floor = float(min(scenario.need_c[n], weight[i] * anchor_rates[key][n]))
                    problem.affine_le(f"carol_qos[{n}]", floor - float(weight[i]) * rate[i], 0.0)
            elif scenario.need_b > 0:
                floor = float(min(scenario.need_b, weight @ anchor_rates[key][active]))
                problem.affine_le("bob_qos", floor - weight @ rate, 0.0)

        if not gains:
            return trajectory

        problem.maximize(sum(gains))
        solution = SolverService.solve(problem, tol_feas=scenario.tol_feas)
        solution.raise_for_status()

        points = np.asarray(solution.value("q"), dtype=float) * H
        points[0] = scenario.q_start
        points[-1] = scenario.q_end

        before = TrajectoryService.throughput(scenario, lin, schedule, anchor)
        after = TrajectoryService.throughput(scenario, lin, schedule, points)
        if after < before - 1e-9 * max(1.0, abs(before)):
            logger.info(f"Trajectory step lowers surrogate throughput ({before:.6f} -> {after:.6f}); keeping anchor")
            return trajectory
        logger.info(f"Trajectory step: surrogate throughput {before:.6f} -> {after:.6f} bit/Hz")
        return Trajectory(points=points)

    @staticmethod
    def throughput(scenario, lin, schedule, points):
        """
        Surrogate throughput sum_n Delta_c R_check_c + Delta_b R_check_b at given waypoints.

        Args:
            scenario: Scenario
            lin: TrajectoryLinearization of the anchor
            schedule: AoiSchedule
            points: (N, 2) waypoints

        Returns:
            float: Throughput in bit/Hz
        """
        points = np.asarray(points, dtype=float)
        j_b = np.sum((points - scenario.user("b")) ** 2, axis=1)
        j_c = np.sum((points - scenario.user("c")) ** 2, axis=1)
        check_b, check_c = SurrogateService.traj_rate_surrogates(lin, j_b, j_c)
        return float(np.asarray(schedule.delta_b) @ check_b + np.asarray(schedule.delta_c) @ check_c)

"""
Service for the beamforming block: the SDR step and beam recovery.
"""

import logging

import cvxpy as cp
import numpy as np
from django.conf import settings

from channel.services.channel_service import ChannelService
from conic.models import ConicProblem
from conic.services.solver_service import SolverService
from covertness.services.detection_service import DetectionService
from subproblems.models import BeamformerPlan
from subproblems.services.rank_one_service import RankOneService
from surrogate.services.surrogate_service import SurrogateService
from utils.helpers import derive_seed

logger = logging.getLogger(__name__)


def _trace(matrix, W):
    return cp.real(cp.trace(matrix @ W))


def _gram(h):
    return np.outer(h, h.conj())


class BeamformingService:
    """
    Service for MRT plans, the noise-normalized SDR step and rank-one recovery.
    """

    @staticmethod
    def mrt_plan(scenario, points, p_b, p_c):
        """
        Steer each user's beam at its own position: w_k[n] = sqrt(p_k[n]/M) a_k(q[n]).

        Args:
            scenario: Scenario
            points: (N, 2) trajectory
            p_b, p_c: Per-slot powers (scalars broadcast)

        Returns:
            BeamformerPlan: MRT beamformers
        """
        points = np.asarray(points, dtype=float)
        N, M = points.shape[0], scenario.M
        p_b = np.broadcast_to(np.asarray(p_b, dtype=float), (N,))
        p_c = np.broadcast_to(np.asarray(p_c, dtype=float), (N,))
        a_b = BeamformingService.steering(scenario, points, "b")
        a_c = BeamformingService.steering(scenario, points, "c")
        return BeamformerPlan(
            w_b=np.sqrt(p_b / M)[:, None] * a_b,
            w_c=np.sqrt(p_c / M)[:, None] * a_c,
        )

    @staticmethod
    def steering(scenario, points, key):
        target = scenario.user(key)
        return np.stack([
            ChannelService.steering_vector(q, target, scenario.H, scenario.M, scenario.spacing_ratio).entries
            for q in np.asarray(points, dtype=float)
        ])

    @staticmethod
    def covert_split(Gamma, epsilon, safety=0.0):
        """
        Largest covert power with p_b + p_c = Gamma and Upsilon(p_b, p_c) <= epsilon.

        Upsilon depends on p_c/p_b only, so the split sits on the ray
        p_c = kappa(epsilon) p_b; ``safety`` widens kappa by (1 + safety).

        Returns:
            tuple: (p_b, p_c) in watts
        """
        kappa = DetectionService.covert_ratio(epsilon) * (1.0 + safety)
        p_b = Gamma / (1.0 + kappa)
        return p_b, Gamma - p_b

    @staticmethod
    def probe_powers(scenario, points, covert=True):
        """
        Per-slot covert power an MRT pair can carry inside the request window.

        The cap is the smallest of the covert split, NOMA fairness at both
        users and Carol's one-slot demand, all evaluated for MRT beams; slots
        outside the window get 0. The covert split is exact, so a slot it
        caps starts with Upsilon = epsilon; the solver safety only widens
        the fairness and demand caps.

        Returns:
            numpy.ndarray: p_b per slot (p_c = Gamma - p_b)
        """
        points = np.asarray(points, dtype=float)
        N, M, Gamma = scenario.N, scenario.M, scenario.Gamma
        safety = settings.OPTIMIZER_SOLVER_SAFETY
        margin = settings.OPTIMIZER_FAIRNESS_MARGIN * Gamma
        a_b = BeamformingService.steering(scenario, points, "b")
        a_c = BeamformingService.steering(scenario, points, "c")
        overlap = np.abs(np.sum(a_b.conj() * a_c, axis=1)) ** 2 / M ** 2

        cap = np.minimum(
            (Gamma * overlap - margin) / (1.0 + safety + overlap),
            (Gamma - margin) / (1.0 + (1.0 + safety) * overlap),
        )
        if covert:
            cap = np.minimum(cap, BeamformingService.covert_split(Gamma, scenario.epsilon)[0])

        d_c = np.array([ChannelService.distance(q, scenario.u_c, scenario.H) for q in points])
        gain = scenario.eta_c * M / d_c ** 2
        target = (2.0 ** (scenario.need_c / scenario.delta) - 1.0) * (1.0 + safety)
        cap = np.minimum(cap, (Gamma * gain - target) / (gain * (1.0 + target * overlap)))

        window = np.zeros(N, dtype=bool)
        window[list(scenario.window_slots)] = True
        return np.where(window, np.maximum(cap, 0.0), 0.0)

    @staticmethod
    def probe_plan(scenario, points, covert=True):
        """
        MRT pair at the probe split in window slots; Carol alone at full power elsewhere.
        """
        p_b = BeamformingService.probe_powers(scenario, points, covert)
        return BeamformingService.mrt_plan(scenario, points, p_b, scenario.Gamma - p_b)

    @staticmethod
    def exclusive_plan(scenario, points, serving):
        """
        Orthogonal slots: Bob alone at full power in serving slots, Carol alone elsewhere.

        With one user per slot, MRT at the whole budget maximizes that user's
        rate, so this plan is optimal for the beamforming block.

        Returns:
            BeamformerPlan: MRT beams with p_b + p_c = Gamma and p_b p_c = 0
        """
        mask = serving.mask(scenario.N)
        return BeamformingService.mrt_plan(
            scenario, points, np.where(mask, scenario.Gamma, 0.0), np.where(mask, 0.0, scenario.Gamma)
        )

    @staticmethod
    def seed_serving(scenario, points, plan, serving, covert=True):
        """
        Give serving slots without covert power the probe beams so that SCA anchors exist.

        Returns:
            BeamformerPlan: Plan with reseeded slots (unchanged when none qualify)
        """
        empty = [n for n in serving.slots if plan.p_b[n] <= 1e-9 * scenario.Gamma]
        if not empty:
            return plan
        probe = BeamformingService.probe_plan(scenario, points, covert)
        w_b, w_c = np.array(plan.w_b), np.array(plan.w_c)
        w_b[empty], w_c[empty] = probe.w_b[empty], probe.w_c[empty]
        logger.debug(f"Seeded probe beams in serving slots {empty}")
        return plan.with_beams(w_b, w_c)

    @staticmethod
    def realign_beams(scenario, points, plan):
        """
        Keep every entry's modulus and point its phase at the user seen from the new waypoints.

        Args:
            scenario: Scenario
            points: (N, 2) new trajectory
            plan: BeamformerPlan designed for the previous trajectory

        Returns:
            BeamformerPlan: Realigned beams with unchanged powers
        """
        a_b = BeamformingService.steering(scenario, points, "b")
        a_c = BeamformingService.steering(scenario, points, "c")
        return BeamformerPlan(w_b=np.abs(plan.w_b) * a_b, w_c=np.abs(plan.w_c) * a_c)

    @staticmethod
    def sdr_step(scenario, schedule, trajectory, plan, serving, covert=True):
        """
        Solve the relaxed beamforming block around the current beams.

        Channels are divided by the noise power so that SINR anchors are
        per unit noise. The objective is the aggregate QoS slack
        sum_n Delta_c r_c + Delta_b r_b of the rate surrogates; each user's
        demand stays covered at least as well as at the anchor.

        Args:
            scenario: Scenario
            schedule: AoiSchedule fixing the ages
            trajectory: Trajectory fixing the channels
            plan: BeamformerPlan used as the SCA anchor
            serving: ServingSchedule; W_b is zero outside it
            covert: Whether the covertness constraint applies

        Returns:
            BeamformerPlan: Anchor beams with the lifted W_b, W_c of the solution

        Raises:
            AnchorDomainError: If a serving slot has no covert power or signal at the anchor
            InfeasibleError: If the relaxation is infeasible
            SolverError: If the solver stops early
        """
        N, M, Gamma = scenario.N, scenario.M, scenario.Gamma
        safety = settings.OPTIMIZER_SOLVER_SAFETY
        margin = settings.OPTIMIZER_FAIRNESS_MARGIN * Gamma
        points = trajectory.points
        h_b = ChannelService.link_channels(scenario, points, "b")
        h_c = ChannelService.link_channels(scenario, points, "c")
        lin = SurrogateService.rate_linearization(scenario, points, plan.w_b, plan.w_c)
        need_c, need_b = scenario.need_c, scenario.need_b
        kappa = DetectionService.covert_ratio(scenario.epsilon) if covert else 0.0

        problem = ConicProblem("beamforming")
        W_b, W_c = {}, {}
        carol_gain, bob_gain = [], []
        bob_floor = 0.0

        for n in range(N):
            W_c[n] = problem.psd(f"W_c[{n}]", M)
            power_c = _trace(np.eye(M), W_c[n])
            power = power_c
            serve = n in serving

            if serve:
                SurrogateService.check_rate_anchors(lin.f_b[n], lin.g_b[n])
                W_b[n] = problem.psd(f"W_b[{n}]", M)
                power_b = _trace(np.eye(M), W_b[n])
                power = power_c + power_b

                for key, h in (("b", h_b[n]), ("c", h_c[n])):
                    direction = _gram(h) / np.vdot(h, h).real
                    problem.affine_le(
                        f"fairness_{key}[{n}]",
                        (1.0 + safety) * _trace(direction, W_b[n]) + margin,
                        _trace(direction, W_c[n]),
                    )

                if covert:
                    plane = SurrogateService.covertness_halfspace(plan.p_b[n], plan.p_c[n], scenario.epsilon)
                    problem.affine_le(f"covertness[{n}]", plane.lhs(power_b, power_c), scenario.epsilon)
                    problem.affine_le(f"covert_ratio[{n}]", kappa * (1.0 + safety) * power_b, power_c)

                if schedule.delta_b[n] > 0:
                    f_hat = problem.real(f"f_b[{n}]", nonneg=True)
                    signal = float(lin.f_b[n]) * _trace(_gram(h_b[n]) / scenario.sigma_b2, W_b[n])
                    problem.hyperbolic(f"signal_b[{n}]", f_hat, signal)
                    r_b = problem.real(f"r_b[{n}]")
                    problem.affine_le(
                        f"rate_b[{n}]",
                        r_b,
                        SurrogateService.normalized_rate_surrogate(f_hat, 1.0, lin.f_b[n], 1.0),
                    )
                    bob_gain.append(float(schedule.delta_b[n]) * r_b)
                    bob_floor += float(schedule.delta_b[n]) * float(SurrogateService.sinr_rate(lin.f_b[n], 1.0))

            problem.affine_le(f"power[{n}]", power, Gamma)

            f_hat = problem.real(f"f_c[{n}]", nonneg=True)
            signal = float(lin.f_c[n]) * _trace(_gram(h_c[n]) / scenario.sigma_c2, W_c[n])
            problem.hyperbolic(f"signal_c[{n}]", f_hat, signal)
            g_hat = problem.real(f"g_c[{n}]")
            leak = _trace(_gram(h_c[n]) / scenario.sigma_c2, W_b[n]) if serve else 0.0
            problem.affine_le(f"interference_c[{n}]", (leak + 1.0) / float(lin.g_c[n]), g_hat)
            r_c = problem.real(f"r_c[{n}]")
            problem.affine_le(
                f"rate_c[{n}]",
                r_c,
                SurrogateService.normalized_rate_surrogate(f_hat, g_hat, lin.f_c[n], lin.g_c[n]),
            )
            delta_c = float(schedule.delta_c[n])
            anchor_rate = float(SurrogateService.sinr_rate(lin.f_c[n], lin.g_c[n]))
            problem.affine_le(f"carol_qos[{n}]", float(min(need_c[n], delta_c * anchor_rate)) - delta_c * r_c, 0.0)
            carol_gain.append(delta_c * r_c)

        if bob_gain and need_b > 0:
            problem.affine_le("bob_qos", min(need_b, bob_floor) - sum(bob_gain), 0.0)

        problem.maximize(sum(carol_gain + bob_gain))
        solution = SolverService.solve(problem, tol_feas=scenario.tol_feas)
        solution.raise_for_status()
        logger.info(f"SDR step: surrogate throughput {solution.objective:.6f} bit/Hz ({len(serving)} serving slots)")

        lifted_b = np.zeros((N, M, M), dtype=complex)
        lifted_c = np.zeros((N, M, M), dtype=complex)
        for n in range(N):
            lifted_c[n] = solution.value(f"W_c[{n}]")
            if n in W_b:
                lifted_b[n] = solution.value(f"W_b[{n}]")
        return BeamformerPlan(
            w_b=plan.w_b, w_c=plan.w_c, W_b=lifted_b, W_c=lifted_c, throughput=float(solution.objective)
        )

    @staticmethod
    def recover_beams(scenario, trajectory, lifted, serving):
        """
        Extract rank-one beams slot by slot from a lifted plan.

        Bob's candidates are ranked by his signal power, Carol's by her rate
        given Bob's chosen beam, with fairness violations penalized. A slot
        whose induced channel powers stray more than OPTIMIZER_RANK_ONE_GAP
        from the lifted values, or whose recovery fails, keeps its anchor beams
        and is flagged.

        Args:
            scenario: Scenario
            trajectory: Trajectory
            lifted: BeamformerPlan from ``sdr_step``
            serving: ServingSchedule

        Returns:
            BeamformerPlan: Recovered beams (no lifted matrices)
        """
        gap_limit = settings.OPTIMIZER_RANK_ONE_GAP
        safety = settings.OPTIMIZER_SOLVER_SAFETY
        margin = settings.OPTIMIZER_FAIRNESS_MARGIN * scenario.Gamma
        h_b = ChannelService.link_channels(scenario, trajectory.points, "b")
        h_c = ChannelService.link_channels(scenario, trajectory.points, "c")
        w_b = np.array(lifted.w_b, dtype=complex)
        w_c = np.array(lifted.w_c, dtype=complex)
        flagged = []

        for n in range(scenario.N):
            channels = (h_b[n], h_c[n])
            directions = [h / np.linalg.norm(h) for h in channels]
            try:
                if n in serving:
                    bob = RankOneService.extract_rank_one(
                        lifted.W_b[n],
                        score=lambda w, h=h_b[n]: abs(np.vdot(h, w)) ** 2,
                        seed=derive_seed(scenario.seed, n, 0),
                    ).vector
                else:
                    bob = np.zeros(scenario.M, dtype=complex)

                def carol_score(w, h=h_c[n], bob=bob, directions=directions):
                    rate = ChannelService.rate_carol(h, w, bob, scenario.sigma_c2)
                    violation = sum(
                        max(0.0, (1.0 + safety) * abs(np.vdot(d, bob)) ** 2 + margin - abs(np.vdot(d, w)) ** 2)
                        for d in directions
                    )
                    return rate - 1e6 * violation / scenario.Gamma

                carol = RankOneService.extract_rank_one(
                    lifted.W_c[n], score=carol_score, seed=derive_seed(scenario.seed, n, 1)
                ).vector
                gap = max(
                    RankOneService.induced_gap(bob, lifted.W_b[n], channels),
                    RankOneService.induced_gap(carol, lifted.W_c[n], channels),
                )
            except (np.linalg.LinAlgError, ValueError) as e:
                logger.warning(f"Rank-one recovery failed in slot {n}: {str(e)}")
                flagged.append(n)
                continue

            if gap > gap_limit:
                logger.warning(f"Rank-one recovery in slot {n} strays {gap:.2%} from the relaxation; keeping previous beams")
                flagged.append(n)
                continue
            w_b[n], w_c[n] = bob, carol

        return BeamformerPlan(w_b=w_b, w_c=w_c, flagged=tuple(flagged))

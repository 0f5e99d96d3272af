"""
Service for the oracle battery that validates the analytics, surrogates and subproblem solvers.
"""

import logging

import cvxpy as cp
import numpy as np
from django.conf import settings

from channel.services.channel_service import ChannelService
from conic.models import ConicProblem
from conic.services.solver_service import SolverService
from covertness.models import EveModel
from covertness.services.detection_service import DetectionService
from covertness.services.oracle_service import DetectionOracleService
from harness.models import CheckOutcome
from scenarios.services.scenario_service import ScenarioService
from subproblems.models import AoiSchedule, ServingSchedule, Trajectory
from subproblems.services.aoi_service import AoiService
from subproblems.services.beamforming_service import BeamformingService
from subproblems.services.feasibility_service import FeasibilityService
from surrogate.services.surrogate_service import SurrogateService
from utils.exceptions import CovertAoiError
from utils.helpers import make_rng

logger = logging.getLogger(__name__)

MC_SIGMAS = 3.0


def _hover_scenario(N, **overrides):
    document = {
        "N": N,
        "M": 2 if N == 1 else 4,
        "q_start": [0.0, 0.0],
        "q_end": [0.0, 0.0],
        "u_b": [100.0, 0.0],
        "u_c": [30.0, 40.0],
        "S_b": 0.0,
        "S_c": 1e6,
    }
    document.update(overrides)
    return ScenarioService.from_dict(document)


class VerificationService:
    """
    Service that runs named checks and reports pass/fail per check.

    Every check takes a seed and returns ``(passed, detail)``.
    """

    @staticmethod
    def check_detection_mc(seed, trials=None, G=None):
        """Closed-form P_FA and P_MD against the radiometer oracle at 20 random points."""
        trials = trials or settings.ORACLE_MC_TRIALS
        G = G or settings.ORACLE_MC_G
        rng = make_rng(seed, 10)
        misses = []
        for i in range(20):
            varpi_b, varpi_c = rng.uniform(0.2, 5.0, size=2)
            sigma_e2 = rng.uniform(0.5, 2.0)
            eve = EveModel.from_varpi(varpi_b, varpi_c, sigma_e2)
            tau = sigma_e2 + rng.uniform(0.2, 3.0) * max(varpi_b, varpi_c)
            estimate = DetectionOracleService.mc_detection_oracle(eve, tau, trials, G, seed=int(rng.integers(2**31)))
            if not DetectionOracleService.within(
                estimate, DetectionService.p_fa(tau, eve), DetectionService.p_md(tau, eve), sigmas=MC_SIGMAS
            ):
                misses.append(i)
        return not misses, f"outside {MC_SIGMAS:g} SE at points {misses}" if misses else "20 points agree"

    @staticmethod
    def check_optimal_threshold(seed):
        """tau* minimizes xi on a fine grid and reaches the closed-form minimum."""
        rng = make_rng(seed, 11)
        worst = 0.0
        for _ in range(20):
            varpi_b, varpi_c = rng.uniform(0.1, 10.0, size=2)
            eve = EveModel.from_varpi(varpi_b, varpi_c, rng.uniform(0.1, 2.0))
            best = float(DetectionService.xi(DetectionService.optimal_tau(eve), eve))
            grid = float(np.min(DetectionService.xi(DetectionService.threshold_grid(eve), eve)))
            if best > grid + 1e-6:
                return False, f"grid beats tau* by {best - grid:.3e}"
            worst = max(worst, abs(best - float(DetectionService.xi_star(varpi_b, varpi_c))))
        example = float(DetectionService.xi_star(1.0, 2.0))
        passed = worst <= 1e-9 and abs(example - 0.75) <= 1e-12
        return passed, f"closed-form gap {worst:.3e}, xi*(1, 2) = {example!r}"

    @staticmethod
    def check_distance_independence(seed):
        """xi at the optimal threshold does not move with Eve's distance."""
        rng = make_rng(seed, 12)
        spread = 0.0
        scenario = ScenarioService.default_scenario(seed)
        for _ in range(10):
            p_b, p_c = rng.uniform(0.1, 10.0, size=2)
            values = []
            for d_e in (scenario.d_min, 2.0 * scenario.d_min, 10.0 * scenario.d_min):
                eve = DetectionService.eve_for_powers(p_b, p_c, scenario, d_e)
                values.append(float(DetectionService.xi(DetectionService.optimal_tau(eve), eve)))
            spread = max(spread, max(values) - min(values))
        return spread <= 1e-12, f"largest spread {spread:.3e}"

    @staticmethod
    def check_upsilon_identity(seed):
        """Upsilon, the closed-form xi* and the threshold minimum agree on random power pairs."""
        rng = make_rng(seed, 13)
        worst = 0.0
        for p_b, p_c in np.exp(rng.uniform(-5.0, 5.0, size=(1000, 2))):
            eve = EveModel.from_varpi(p_b, p_c, 1.0)
            xi = float(DetectionService.xi(DetectionService.optimal_tau(eve), eve))
            upsilon = float(DetectionService.upsilon(p_b, p_c))
            worst = max(worst, abs(upsilon - (1.0 - xi)), abs(upsilon - (1.0 - float(DetectionService.xi_star(p_b, p_c)))))
        return worst <= 1e-12, f"largest gap {worst:.3e}"

    @staticmethod
    def check_upsilon_gradient(seed):
        """Analytic gradient of Upsilon against central differences off the diagonal."""
        rng = make_rng(seed, 14)
        worst = 0.0
        for p_b, p_c in np.exp(rng.uniform(-3.0, 3.0, size=(1000, 2))):
            if abs(p_c / p_b - 1.0) < 1e-2:
                continue
            analytic = DetectionService.upsilon_grad(p_b, p_c)
            steps = (1e-6 * p_b, 1e-6 * p_c)
            numeric = (
                (DetectionService.upsilon(p_b + steps[0], p_c) - DetectionService.upsilon(p_b - steps[0], p_c)) / (2 * steps[0]),
                (DetectionService.upsilon(p_b, p_c + steps[1]) - DetectionService.upsilon(p_b, p_c - steps[1])) / (2 * steps[1]),
            )
            for a, n in zip(analytic, numeric):
                worst = max(worst, abs(float(a) - float(n)) / max(abs(float(n)), 1e-6))
        return worst <= 1e-6, f"largest relative error {worst:.3e}"

    @staticmethod
    def check_surrogate_bounds(seed):
        """Trajectory, distance and SINR surrogates stay below their targets and touch them at the anchor."""
        rng = make_rng(seed, 15)
        scenario = ScenarioService.default_scenario(seed)
        N, M = scenario.N, scenario.M
        points = np.linspace(scenario.q_start, scenario.q_end, N)
        w_b = np.sqrt(0.1 / M) * BeamformingService.steering(scenario, points, "b")
        w_c = np.sqrt(0.9 / M) * BeamformingService.steering(scenario, points, "c")
        lin = SurrogateService.linearize_trajectory(scenario, points, w_b, w_c)

        check_b, check_c = SurrogateService.traj_rate_surrogates(lin, lin.j_b, lin.j_c)
        bound_b, bound_c = SurrogateService.traj_rate_bounds(lin)
        anchor_gap = max(np.max(np.abs(check_b - bound_b)), np.max(np.abs(check_c - bound_c)))

        violations = 0
        for _ in range(1000):
            j_b = lin.j_b * np.exp(rng.uniform(-2.0, 2.0, size=N))
            j_c = lin.j_c * np.exp(rng.uniform(-2.0, 2.0, size=N))
            check_b, check_c = SurrogateService.traj_rate_surrogates(lin, j_b, j_c)
            bound_b, bound_c = SurrogateService.traj_rate_bounds(lin, j_b, j_c)
            violations += int(np.sum(check_b > bound_b + 1e-12) + np.sum(check_c > bound_c + 1e-12))

            q, anchor, u = rng.uniform(-500.0, 500.0, size=(3, 2))
            violations += int(SurrogateService.slack_distance_bound(q, anchor, u) > np.sum((q - u) ** 2) + 1e-9)

            f, g, f0, g0 = np.exp(rng.uniform(-3.0, 3.0, size=4))
            violations += int(SurrogateService.sinr_rate_surrogate(f, g, f0, g0) > SurrogateService.sinr_rate(f, g) + 1e-12)

        passed = violations == 0 and anchor_gap <= 1e-9
        return passed, f"{violations} violations, anchor gap {anchor_gap:.3e}"

    @staticmethod
    def check_aoi_grid(seed):
        """Two-slot AoI program against a grid search."""
        rng = make_rng(seed, 16)
        worst = 0.0
        for _ in range(5):
            rate_b = rng.uniform(2.0, 8.0, size=2)
            rate_c = rng.uniform(6.0, 12.0, size=2)
            s_b = rng.uniform(1e6, 0.9e6 * float(np.sum(rate_b)))
            scenario = _hover_scenario(2, S_b=s_b, S_c=5e6, u_c=[0.0, 100.0])
            trajectory = Trajectory(points=np.zeros((2, 2)))
            schedule = AoiService.solve_aoi_lp(rate_b, rate_c, scenario, ServingSchedule.of([0, 1]), trajectory)

            grid = np.linspace(0.0, 1.0, 1001)
            first, second = np.meshgrid(grid, grid, indexing="ij")
            feasible = first * rate_b[0] + second * rate_b[1] >= scenario.need_b
            best = np.min(np.where(feasible, first + second, np.inf)) + np.sum(scenario.need_c / rate_c)
            if schedule.objective > best + 1e-6:
                return False, f"program {schedule.objective:.6f} above grid {best:.6f}"
            worst = max(worst, best - schedule.objective)
        return worst <= 2e-3, f"largest grid excess {worst:.3e}"

    @staticmethod
    def check_sdp_analytic(seed):
        """Minimum-power SDP with one signal constraint returns 1/||h||^2."""
        rng = make_rng(seed, 17)
        worst = 0.0
        for _ in range(5):
            h = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            problem = ConicProblem("sdp_check")
            W = problem.psd("W", 3)
            problem.affine_le("signal", 1.0 - cp.real(cp.trace(np.outer(h, h.conj()) @ W)), 0.0)
            problem.minimize(cp.real(cp.trace(W)))
            solution = SolverService.solve(problem)
            expected = 1.0 / np.vdot(h, h).real
            worst = max(worst, abs(solution.objective - expected) / expected)
        return worst <= 1e-6, f"largest relative error {worst:.3e}"

    @staticmethod
    def serving_slot_throughput(scenario, trajectory, schedule, plan):
        """
        Exact Delta_b R_b + Delta_c R_c of a one-slot plan and whether it meets power, covertness and fairness.

        Returns:
            tuple: (throughput in bit/Hz, feasible)
        """
        rates = ChannelService.slot_rates(scenario, trajectory.points, plan.w_b, plan.w_c)
        serving = ServingSchedule.of(range(scenario.N))
        residuals = FeasibilityService.residuals(scenario, trajectory, plan, schedule, serving, rates=rates)
        feasible = all(residuals[name] <= scenario.tol_feas for name in ("power", "covertness", "fairness"))
        throughput = float(schedule.delta_b @ rates[0] + schedule.delta_c @ rates[1])
        return throughput, feasible

    @staticmethod
    def serving_slot_grid(scenario, trajectory, schedule, size=100):
        """
        Rank-one brute force for one serving slot with M = 2.

        The grid runs over the covert share of Gamma and the relative phase
        of Bob's two antenna entries; Carol keeps an MRT beam at the rest of
        the budget. Points that break covertness or fairness are discarded.

        Args:
            scenario: One-slot scenario with M = 2
            trajectory: One-waypoint Trajectory
            schedule: AoiSchedule weighting the two rates
            size: Points per axis

        Returns:
            tuple: (best throughput, grid resolution at the best point)
        """
        Gamma, M = scenario.Gamma, scenario.M
        margin = settings.OPTIMIZER_FAIRNESS_MARGIN * Gamma
        points = trajectory.points
        h_b = ChannelService.link_channels(scenario, points, "b")[0]
        h_c = ChannelService.link_channels(scenario, points, "c")[0]
        a_c = BeamformingService.steering(scenario, points, "c")[0]

        share, phase = np.meshgrid(
            np.linspace(0.0, 1.0, size + 2)[1:-1], np.linspace(0.0, 2.0 * np.pi, size, endpoint=False), indexing="ij"
        )
        p_b = share * Gamma
        p_c = Gamma - p_b
        w_b = np.sqrt(p_b / 2.0)[..., None] * np.stack([np.ones_like(phase), np.exp(1j * phase)], axis=-1)
        w_c = np.sqrt(p_c / M)[..., None] * a_c

        def gain(h, w):
            return np.abs(w @ h.conj()) ** 2

        rate_b = np.log2(1.0 + gain(h_b, w_b) / scenario.sigma_b2)
        rate_c = np.log2(1.0 + gain(h_c, w_c) / (gain(h_c, w_b) + scenario.sigma_c2))
        feasible = DetectionService.upsilon(p_b, p_c) <= scenario.epsilon
        for h in (h_b, h_c):
            d = h / np.linalg.norm(h)
            feasible &= gain(d, w_b) + margin <= gain(d, w_c)
        value = np.where(
            feasible, float(schedule.delta_b[0]) * rate_b + float(schedule.delta_c[0]) * rate_c, -np.inf
        )

        i, j = np.unravel_index(np.argmax(value), value.shape)
        best = float(value[i, j])
        # the phase axis wraps around
        neighbors = [
            value[i + di, (j + dj) % size]
            for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1))
            if 0 <= i + di < size
        ]
        steps = [abs(best - float(v)) for v in neighbors if np.isfinite(v)]
        return best, max(steps, default=0.0)

    @staticmethod
    def sdr_climb(scenario, trajectory, schedule, anchor, steps=8):
        """
        Repeat the SDR step and rank-one recovery on one serving slot while the exact throughput rises.

        Returns:
            float: Best exact throughput over the feasible iterates, the anchor included
        """
        serving = ServingSchedule.of(range(scenario.N))
        best, feasible = VerificationService.serving_slot_throughput(scenario, trajectory, schedule, anchor)
        best = best if feasible else -np.inf
        plan = anchor
        for _ in range(steps):
            lifted = BeamformingService.sdr_step(scenario, schedule, trajectory, plan, serving)
            recovered = BeamformingService.recover_beams(scenario, trajectory, lifted, serving)
            value, feasible = VerificationService.serving_slot_throughput(scenario, trajectory, schedule, recovered)
            if not feasible or value <= best + 1e-9 or np.any(recovered.p_b <= 0.0):
                break
            best, plan = value, recovered
        return best

    @staticmethod
    def check_beamforming_brute_force(seed):
        """One serving slot with M = 2: SDR and rank-one recovery against a 10^4-point rank-one grid."""
        scenario = _hover_scenario(1, S_b=1e6, seed=seed)
        trajectory = Trajectory(points=np.zeros((1, 2)))
        schedule = AoiSchedule(
            delta_b=np.full(1, scenario.delta), delta_c=np.full(1, scenario.delta), airtime=np.full(1, scenario.delta)
        )
        anchor = BeamformingService.mrt_plan(scenario, trajectory.points, 0.05 * scenario.Gamma, 0.95 * scenario.Gamma)
        best, resolution = VerificationService.serving_slot_grid(scenario, trajectory, schedule)
        reached = VerificationService.sdr_climb(scenario, trajectory, schedule, anchor)
        passed = np.isfinite(best) and reached >= best - resolution - 1e-6
        return passed, f"SDR {reached:.6f} bit/Hz, grid {best:.6f} bit/Hz (resolution {resolution:.2e})"

    @staticmethod
    def checks():
        """
        Registered checks in run order.

        Returns:
            dict: Name to callable
        """
        return {
            "detection_mc": VerificationService.check_detection_mc,
            "optimal_threshold": VerificationService.check_optimal_threshold,
            "distance_independence": VerificationService.check_distance_independence,
            "upsilon_identity": VerificationService.check_upsilon_identity,
            "upsilon_gradient": VerificationService.check_upsilon_gradient,
            "surrogate_bounds": VerificationService.check_surrogate_bounds,
            "aoi_grid": VerificationService.check_aoi_grid,
            "sdp_analytic": VerificationService.check_sdp_analytic,
            "beamforming_brute_force": VerificationService.check_beamforming_brute_force,
        }

    @staticmethod
    def run(names=None, seed=0, checks=None):
        """
        Run checks and collect their outcomes; a check that raises fails.

        Args:
            names: Subset of check names (all by default)
            seed: Seed handed to every check
            checks: Optional name-to-callable mapping replacing the registry

        Returns:
            list: CheckOutcome per check, in run order

        Raises:
            KeyError: If a requested name is not registered
        """
        registry = checks if checks is not None else VerificationService.checks()
        names = list(registry) if names is None else list(names)
        unknown = [name for name in names if name not in registry]
        if unknown:
            raise KeyError(f"Unknown checks: {', '.join(unknown)}")

        outcomes = []
        for name in names:
            try:
                passed, detail = registry[name](seed)
            except (CovertAoiError, ValueError, np.linalg.LinAlgError) as e:
                passed, detail = False, f"raised {type(e).__name__}: {str(e)}"
            outcome = CheckOutcome(name=name, passed=bool(passed), detail=detail)
            if outcome.passed:
                logger.info(f"Check {name} passed: {detail}")
            else:
                logger.error(f"Check {name} failed: {detail}")
            outcomes.append(outcome)
        return outcomes

"""
Service for the convexifying bounds and first-order surrogates used by the SCA blocks.
"""

import logging

import cvxpy as cp
import numpy as np

from channel.services.channel_service import ChannelService
from covertness.services.detection_service import DetectionService
from surrogate.models import (
    CovertnessHalfspace,
    RateLinearization,
    TangentProbe,
    TrajectoryLinearization,
)
from utils.exceptions import AnchorDomainError
from utils.helpers import make_rng

logger = logging.getLogger(__name__)

LOG2E = 1.0 / np.log(2.0)


class SurrogateService:
    """
    Service for phase-aligned power bounds, trajectory and SINR rate
    surrogates, and the linearized covertness constraint.
    """

    @staticmethod
    def aligned_power_bound(w, d, mu0):
        """
        Upper bound on |h^H w|^2 reached when w's phases conjugate the steering vector.

        Args:
            w: Complex beamformer
            d: Distance in meters (> 0)
            mu0: Reference channel power

        Returns:
            float: mu0 * (sum_m |w_m|)^2 / d^2
        """
        return float(mu0 * np.sum(np.abs(np.asarray(w))) ** 2 / d ** 2)

    @staticmethod
    def aligned_powers(w):
        """Per-slot (sum_m |w_m|)^2 for an (N, M) beamformer matrix."""
        return np.sum(np.abs(np.asarray(w)), axis=1) ** 2

    @staticmethod
    def linearize_trajectory(scenario, points, w_b, w_c):
        """
        Build the trajectory expansion point from the current path and beamformers.

        Args:
            scenario: Scenario
            points: (N, 2) anchor trajectory
            w_b: (N, M) Bob beamformers
            w_c: (N, M) Carol beamformers

        Returns:
            TrajectoryLinearization: Anchor distances and aligned powers
        """
        points = np.asarray(points, dtype=float)
        return TrajectoryLinearization(
            points=points,
            j_b=np.sum((points - scenario.user("b")) ** 2, axis=1),
            j_c=np.sum((points - scenario.user("c")) ** 2, axis=1),
            z_b=SurrogateService.aligned_powers(w_b),
            z_c=SurrogateService.aligned_powers(w_c),
            eta_b=scenario.eta_b,
            eta_c=scenario.eta_c,
            H=scenario.H,
        )

    @staticmethod
    def traj_rate_bounds(lin, j_b=None, j_c=None):
        """
        Phase-aligned rate bounds R_hat at squared distances j (the anchor by default).

        Returns:
            tuple: (R_hat_b, R_hat_c) arrays in bit/s/Hz
        """
        j_b = lin.j_b if j_b is None else np.asarray(j_b, dtype=float)
        j_c = lin.j_c if j_c is None else np.asarray(j_c, dtype=float)
        a_b, a_bc, a_cc = lin.gains()
        rate_b = np.log2(1.0 + a_b / (1.0 + j_b / lin.H ** 2))
        rate_c = np.log2(1.0 + a_cc / (a_bc + 1.0 + j_c / lin.H ** 2))
        return rate_b, rate_c

    @staticmethod
    def traj_rate_terms(lin):
        """
        Constant pieces of the trajectory rate surrogates in H-scaled units.

        Each user's surrogate reads
        log2(gain + j_lo/H^2 + 1) - base - slope * (j_up - j_zeta)/H^2.

        Returns:
            dict: ``gain``, ``base`` and ``slope`` arrays per user key
        """
        a_b, a_bc, a_cc = lin.gains()
        anchor_b = lin.j_b / lin.H ** 2 + 1.0
        anchor_c = a_bc + lin.j_c / lin.H ** 2 + 1.0
        return {
            "b": {"gain": a_b, "base": np.log2(anchor_b), "slope": LOG2E / anchor_b},
            "c": {"gain": a_bc + a_cc, "base": np.log2(anchor_c), "slope": LOG2E / anchor_c},
        }

    @staticmethod
    def traj_rate_surrogates(lin, j_b, j_c, j_b_lo=None, j_c_lo=None):
        """
        Concave lower surrogates of the rate bounds in the squared distances.

        The decreasing log term is replaced by its tangent at the anchor, so
        with a single j the surrogate never exceeds R_hat(j) and matches it at
        the anchor. The increasing term may take a separate lower slack.

        Args:
            lin: TrajectoryLinearization
            j_b, j_c: Squared distances entering the tangent, meters^2
            j_b_lo, j_c_lo: Squared distances entering the increasing term (default j)

        Returns:
            tuple: (R_check_b, R_check_c) arrays in bit/s/Hz
        """
        j_b = np.asarray(j_b, dtype=float)
        j_c = np.asarray(j_c, dtype=float)
        j_b_lo = j_b if j_b_lo is None else np.asarray(j_b_lo, dtype=float)
        j_c_lo = j_c if j_c_lo is None else np.asarray(j_c_lo, dtype=float)
        terms = SurrogateService.traj_rate_terms(lin)
        scale = lin.H ** 2

        def surrogate(key, j, j_lo, j_anchor):
            t = terms[key]
            return (
                np.log2(t["gain"] + j_lo / scale + 1.0)
                - t["base"]
                - t["slope"] * (j - j_anchor) / scale
            )

        return (
            surrogate("b", j_b, j_b_lo, lin.j_b),
            surrogate("c", j_c, j_c_lo, lin.j_c),
        )

    @staticmethod
    def slack_distance_bound(q, q_anchor, u):
        """
        Tangent lower bound of ||q - u||^2 at q_anchor.

        Args:
            q: Position(s); an (N, 2) array or cvxpy expression
            q_anchor: Expansion point(s) of the same shape
            u: Ground position

        Returns:
            Bound value(s); affine in q
        """
        q_anchor = np.asarray(q_anchor, dtype=float)
        gap = q_anchor - np.asarray(u, dtype=float)
        axis = gap.ndim - 1
        base = np.sum(gap ** 2, axis=axis)
        if isinstance(q, cp.Expression):
            return base + 2.0 * cp.sum(cp.multiply(gap, q - q_anchor), axis=axis)
        return base + 2.0 * np.sum(gap * (np.asarray(q, dtype=float) - q_anchor), axis=axis)

    @staticmethod
    def rate_linearization(scenario, points, w_b, w_c):
        """
        Per-unit-noise SINR anchors of the current beamformers.

        Args:
            scenario: Scenario
            points: (N, 2) trajectory
            w_b, w_c: (N, M) beamformers

        Returns:
            RateLinearization: f and g anchors; f is infinite where a user gets no signal
        """
        h_b = ChannelService.link_channels(scenario, points, "b")
        h_c = ChannelService.link_channels(scenario, points, "c")
        signal_b = np.abs(np.sum(h_b.conj() * w_b, axis=1)) ** 2 / scenario.sigma_b2
        signal_c = np.abs(np.sum(h_c.conj() * w_c, axis=1)) ** 2 / scenario.sigma_c2
        leak_c = np.abs(np.sum(h_c.conj() * w_b, axis=1)) ** 2 / scenario.sigma_c2
        with np.errstate(divide="ignore"):
            return RateLinearization(
                f_b=1.0 / signal_b,
                f_c=1.0 / signal_c,
                g_b=np.ones(len(points)),
                g_c=leak_c + 1.0,
            )

    @staticmethod
    def sinr_rate(f, g):
        """log2(1 + 1/(f g)), the rate as a function of the SINR decomposition."""
        return np.log2(1.0 + 1.0 / (np.asarray(f, dtype=float) * np.asarray(g, dtype=float)))

    @staticmethod
    def sinr_rate_slope(f_anchor, g_anchor):
        """Common coefficient log2(e)/(1 + f g) of the normalized tangent."""
        return LOG2E / (1.0 + np.asarray(f_anchor, dtype=float) * np.asarray(g_anchor, dtype=float))

    @staticmethod
    def check_rate_anchors(f_anchor, g_anchor):
        """Raise AnchorDomainError unless every SINR anchor is positive and finite."""
        f_anchor = np.asarray(f_anchor, dtype=float)
        g_anchor = np.asarray(g_anchor, dtype=float)
        if not (np.all(np.isfinite(f_anchor)) and np.all(f_anchor > 0) and np.all(g_anchor > 0)):
            raise AnchorDomainError("SINR anchors must be positive and finite")

    @staticmethod
    def sinr_rate_surrogate(f, g, f_anchor, g_anchor):
        """
        Tangent lower bound of log2(1 + 1/(f g)), affine in (f, g).

        Args:
            f, g: Evaluation point (floats, arrays or affine cvxpy expressions)
            f_anchor, g_anchor: Positive anchors

        Returns:
            Surrogate rate R_tilde in bit/s/Hz

        Raises:
            AnchorDomainError: If an anchor is not strictly positive and finite
        """
        f_anchor = np.asarray(f_anchor, dtype=float)
        g_anchor = np.asarray(g_anchor, dtype=float)
        SurrogateService.check_rate_anchors(f_anchor, g_anchor)
        return SurrogateService.normalized_rate_surrogate(f / f_anchor, g / g_anchor, f_anchor, g_anchor)

    @staticmethod
    def normalized_rate_surrogate(f_hat, g_hat, f_anchor, g_anchor):
        """
        The SINR-rate tangent in anchor-normalized variables f_hat = f/f^iota, g_hat = g/g^iota.

        Returns:
            R_tilde = log2(1 + 1/(f^iota g^iota)) - L (f_hat - 1) - L (g_hat - 1)

        Raises:
            AnchorDomainError: If an anchor is not strictly positive and finite
        """
        f_anchor = np.asarray(f_anchor, dtype=float)
        g_anchor = np.asarray(g_anchor, dtype=float)
        SurrogateService.check_rate_anchors(f_anchor, g_anchor)
        slope = SurrogateService.sinr_rate_slope(f_anchor, g_anchor)
        value = SurrogateService.sinr_rate(f_anchor, g_anchor)
        if isinstance(f_hat, cp.Expression) or isinstance(g_hat, cp.Expression):
            return value - cp.multiply(slope, f_hat - 1.0) - cp.multiply(slope, g_hat - 1.0)
        return value - slope * (f_hat - 1.0) - slope * (g_hat - 1.0)

    @staticmethod
    def covertness_halfspace(anchor_b, anchor_c, epsilon):
        """
        Linearize the covertness constraint Upsilon(p_b, p_c) <= epsilon at the anchors.

        Args:
            anchor_b: Covert power anchor (> 0)
            anchor_c: Public power anchor (> 0)
            epsilon: Covertness requirement

        Returns:
            CovertnessHalfspace: Value and gradient at the anchor

        Raises:
            AnchorDomainError: If an anchor is not strictly positive
        """
        if not (anchor_b > 0.0 and anchor_c > 0.0):
            raise AnchorDomainError(f"covertness anchors must be positive, got ({anchor_b}, {anchor_c})")
        grad_b, grad_c = DetectionService.upsilon_grad(anchor_b, anchor_c)
        return CovertnessHalfspace(
            value=float(DetectionService.upsilon(anchor_b, anchor_c)),
            grad_b=float(grad_b),
            grad_c=float(grad_c),
            anchor_b=float(anchor_b),
            anchor_c=float(anchor_c),
            epsilon=float(epsilon),
        )

    @staticmethod
    def probe_covertness_tangent(grid=20, nearby=100, spread=1.0, seed=0, low=0.1, high=10.0):
        """
        Check on a log-grid whether the covertness tangent over-estimates the function nearby.

        The covertness function is not concave, so violations are expected
        away from the anchor ray; they are logged, never raised.

        Args:
            grid: Anchors per axis
            nearby: Perturbed samples per anchor
            spread: Half-width of the log-uniform perturbation
            seed: Generator seed
            low, high: Power range of the anchor grid

        Returns:
            TangentProbe: Violation count and worst gap
        """
        rng = make_rng(seed)
        levels = np.geomspace(low, high, grid)
        violations, worst, anchors = 0, 0.0, 0
        for anchor_b in levels:
            for anchor_c in levels:
                if np.isclose(anchor_b, anchor_c):
                    continue
                anchors += 1
                plane = SurrogateService.covertness_halfspace(anchor_b, anchor_c, 1.0)
                factors = np.exp(rng.uniform(-spread, spread, size=(nearby, 2)))
                p_b, p_c = anchor_b * factors[:, 0], anchor_c * factors[:, 1]
                gap = DetectionService.upsilon(p_b, p_c) - plane.lhs(p_b, p_c)
                violations += int(np.sum(gap > 1e-12))
                worst = max(worst, float(np.max(gap)))

        if violations:
            logger.warning(
                f"Covertness tangent under-estimates at {violations} of {anchors * nearby} points "
                f"(worst gap {worst:.3e})"
            )
        return TangentProbe(anchors=anchors, samples=anchors * nearby, violations=violations, worst_gap=worst)

"""
Service for evaluating the joint problem's constraints exactly.
"""

import logging

import numpy as np
from django.conf import settings

from channel.services.channel_service import ChannelService
from covertness.services.detection_service import DetectionService
from subproblems.models import FeasibilityReport

logger = logging.getLogger(__name__)

RESIDUAL_NAMES = (
    "power", "fairness", "covertness", "slot_bounds", "carol_qos",
    "bob_qos", "speed", "endpoints", "idle", "exclusive",
)


def _positive(values):
    return float(np.max(np.maximum(np.asarray(values, dtype=float), 0.0), initial=0.0))


class FeasibilityService:
    """
    Service for exact (non-surrogate) residuals of a candidate point.
    """

    @staticmethod
    def residuals(scenario, trajectory, plan, schedule, serving, covert=True, rates=None, exclusive=False):
        """
        Relative violation of every constraint family; 0 means satisfied.

        Power, fairness and idle-slot residuals are relative to Gamma, slot
        bounds to delta, demands to the demand and moves to the per-slot
        move budget. Covertness is the absolute excess of Upsilon over epsilon.
        With ``exclusive`` the serving slots belong to Bob alone: fairness has
        no superposition to order, Carol's demand binds only outside them and
        any public power or Carol age inside them counts as a violation.

        Args:
            scenario: Scenario
            trajectory: Trajectory
            plan: BeamformerPlan
            schedule: AoiSchedule
            serving: ServingSchedule
            covert: Whether the covertness constraint applies
            rates: Optional precomputed (R_b, R_c)
            exclusive: Whether serving slots are closed to Carol

        Returns:
            dict: Residual per constraint family
        """
        N, delta, Gamma = scenario.N, scenario.delta, scenario.Gamma
        points = trajectory.points
        if rates is None:
            rates = ChannelService.slot_rates(scenario, points, plan.w_b, plan.w_c)
        rate_b, rate_c = rates
        p_b, p_c = plan.p_b, plan.p_c
        serving_mask = serving.mask(N)
        served = np.flatnonzero(serving_mask)
        margin = settings.OPTIMIZER_FAIRNESS_MARGIN * Gamma

        residuals = {"power": _positive((p_b + p_c - Gamma) / Gamma)}

        fairness = [0.0]
        if served.size and not exclusive:
            for key in ("b", "c"):
                h = ChannelService.link_channels(scenario, points[served], key)
                h = h / np.linalg.norm(h, axis=1, keepdims=True)
                public = np.abs(np.sum(h.conj() * plan.w_c[served], axis=1)) ** 2
                covert_gain = np.abs(np.sum(h.conj() * plan.w_b[served], axis=1)) ** 2
                fairness.append(_positive((covert_gain + margin - public) / Gamma))
        residuals["fairness"] = max(fairness)

        upsilon = [0.0]
        if covert and served.size:
            upsilon = DetectionService.upsilon(p_b[served], p_c[served]) - scenario.epsilon
        residuals["covertness"] = _positive(upsilon)

        ages = np.concatenate([schedule.delta_b, schedule.delta_c, schedule.airtime])
        residuals["slot_bounds"] = max(_positive(-ages / delta), _positive(ages / delta - 1.0))

        need_c = scenario.need_c
        carol = ~serving_mask if exclusive else np.ones(N, dtype=bool)
        residuals["carol_qos"] = _positive(((need_c - schedule.delta_c * rate_c) / need_c)[carol])

        need_b = scenario.need_b
        delivered = float(np.sum(schedule.delta_b[served] * rate_b[served]))
        residuals["bob_qos"] = _positive((need_b - delivered) / need_b) if need_b > 0 else 0.0

        budget = max(scenario.move_budget, 1.0)
        allowed = scenario.V_max * np.asarray(schedule.airtime[:-1], dtype=float)
        residuals["speed"] = _positive((trajectory.moves() - allowed) / budget)

        span = max(float(np.linalg.norm(np.subtract(scenario.q_end, scenario.q_start))), 1.0)
        offsets = np.linalg.norm(points[0] - np.asarray(scenario.q_start)) + np.linalg.norm(
            points[-1] - np.asarray(scenario.q_end)
        )
        residuals["endpoints"] = float(offsets / span)

        idle = ~serving_mask
        residuals["idle"] = max(_positive(p_b[idle] / Gamma), _positive(schedule.delta_b[idle] / delta))
        residuals["exclusive"] = 0.0
        if exclusive:
            residuals["exclusive"] = max(
                _positive(p_c[served] / Gamma), _positive(np.asarray(schedule.delta_c)[served] / delta)
            )
        return residuals

    @staticmethod
    def report(residuals, tol=None):
        """
        Summarize residuals against a tolerance.

        Args:
            residuals: Output of ``residuals``
            tol: Feasibility tolerance (defaults to OPTIMIZER_TOL_FEAS)

        Returns:
            FeasibilityReport: Worst residual and overall verdict
        """
        tol = settings.OPTIMIZER_TOL_FEAS if tol is None else tol
        worst = max(residuals, key=lambda name: residuals[name])
        value = residuals[worst]
        return FeasibilityReport(residuals=dict(residuals), worst=worst, worst_value=value, ok=value <= tol)

"""
Service for choosing the slots in which Bob is served.
"""

import logging

import numpy as np
from django.conf import settings

from subproblems.models import ServingSchedule
from utils.exceptions import InfeasibleError

logger = logging.getLogger(__name__)


class ServingService:
    """
    Service for the greedy serving-slot selection.
    """

    @staticmethod
    def select_serving_slots(scenario, rates, safety=None):
        """
        Pick request-window slots by descending rate until Bob's demand is covered with margin.

        Ties go to the lower slot index.

        Args:
            scenario: Scenario
            rates: Bob's achievable rate per slot (length N), bit/s/Hz
            safety: Demand multiplier (defaults to OPTIMIZER_SERVING_SAFETY)

        Returns:
            ServingSchedule: Chosen slots

        Raises:
            InfeasibleError: If the whole window cannot carry Bob's packet
        """
        safety = settings.OPTIMIZER_SERVING_SAFETY if safety is None else safety
        if scenario.S_b == 0:
            return ServingSchedule()

        rates = np.asarray(rates, dtype=float)
        window = scenario.window_slots
        volume = scenario.delta * scenario.B_hz
        capacity = volume * float(np.sum(np.maximum(rates[list(window)], 0.0)))
        if capacity < scenario.S_b:
            raise InfeasibleError(
                f"request window carries {capacity:.4g} bit, Bob needs {scenario.S_b:.4g}",
                binding="bob_request_window",
            )
        target = safety * scenario.S_b
        if capacity < target:
            logger.warning(
                f"Request window carries {capacity:.4g} bit, short of the {target:.4g} bit safety target; "
                f"serving the whole window"
            )
            return ServingSchedule.of(window)

        chosen, carried = [], 0.0
        for n in sorted(window, key=lambda k: (-rates[k], k)):
            chosen.append(n)
            carried += volume * rates[n]
            if carried >= target:
                break
        logger.debug(f"Serving Bob in {len(chosen)} slots carrying {carried:.4g} bit")
        return ServingSchedule.of(chosen)

"""
Celery tasks for the orchestrator app.
"""

import logging

from celery import shared_task

from harness.services.sweep_service import SweepService

logger = logging.getLogger(__name__)


@shared_task
def run_sweep_point(point):
    """
    Run one sweep point on a worker.

    Args:
        point (dict): Scenario document, baseline, value and repetition

    Returns:
        dict: Summary row of the point
    """
    logger.info(f"Worker picked up {point['parameter']}={point['value']} ({point['baseline']}, rep {point['repetition']})")
    return SweepService.run_point(point)

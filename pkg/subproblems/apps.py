"""
AppConfig for the subproblems app.
"""

from django.apps import AppConfig


class SubproblemsConfig(AppConfig):
    """
    Configuration for the subproblems app: the AoI, trajectory and beamforming blocks.
    """

    default_auto_field = "django.db.models.BigAutoField"
    name = "subproblems"

"""
AppConfig for the orchestrator app.
"""

from django.apps import AppConfig


class OrchestratorConfig(AppConfig):
    """
    Configuration for the orchestrator app: alternating optimization, initialization and baselines.
    """

    default_auto_field = "django.db.models.BigAutoField"
    name = "orchestrator"

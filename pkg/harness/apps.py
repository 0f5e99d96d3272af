"""
AppConfig for the harness app.
"""

from django.apps import AppConfig


class HarnessConfig(AppConfig):
    """
    Configuration for the harness app: command-line runs, sweeps and verification.
    """

    default_auto_field = "django.db.models.BigAutoField"
    name = "harness"

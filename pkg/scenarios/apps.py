"""
AppConfig for the scenarios app.
"""

from django.apps import AppConfig


class ScenariosConfig(AppConfig):
    """
    Configuration for the scenarios app: parameter ingestion and validation.
    """

    default_auto_field = "django.db.models.BigAutoField"
    name = "scenarios"

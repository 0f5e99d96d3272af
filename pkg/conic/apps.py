"""
AppConfig for the conic app.
"""

from django.apps import AppConfig


class ConicConfig(AppConfig):
    """
    Configuration for the conic app: conic problem building and solving.
    """

    default_auto_field = "django.db.models.BigAutoField"
    name = "conic"

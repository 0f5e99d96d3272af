"""
AppConfig for the covertness app.
"""

from django.apps import AppConfig


class CovertnessConfig(AppConfig):
    """
    Configuration for the covertness app: radiometer analytics at Eve.
    """

    default_auto_field = "django.db.models.BigAutoField"
    name = "covertness"

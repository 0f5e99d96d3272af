"""
AppConfig for the utils app.
"""

from django.apps import AppConfig


class UtilsConfig(AppConfig):
    """
    Configuration for the utils app.
    """

    default_auto_field = "django.db.models.BigAutoField"
    name = "utils"

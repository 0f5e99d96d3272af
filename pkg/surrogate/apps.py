"""
AppConfig for the surrogate app.
"""

from django.apps import AppConfig


class SurrogateConfig(AppConfig):
    """
    Configuration for the surrogate app: convex bounds and first-order surrogates.
    """

    default_auto_field = "django.db.models.BigAutoField"
    name = "surrogate"

"""
AppConfig for the channel app.
"""

from django.apps import AppConfig


class ChannelConfig(AppConfig):
    """
    Configuration for the channel app: geometry, array response and link rates.
    """

    default_auto_field = "django.db.models.BigAutoField"
    name = "channel"

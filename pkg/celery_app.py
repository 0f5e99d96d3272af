"""
Celery configuration for the covert_aoi project.
"""

import os

from celery import Celery
from django.conf import settings

# Set the default Django settings module
os.environ.setdefault("DJANGO_SETTINGS_MODULE", "settings")

# Create the Celery app
app = Celery("covert_aoi")

# Use a string here to avoid pickle issues
app.config_from_object("django.conf:settings", namespace="CELERY")

# Load sweep tasks from all registered Django apps
app.autodiscover_tasks(lambda: settings.INSTALLED_APPS)

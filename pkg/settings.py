"""
Django settings for the covert_aoi project.
"""

import os
from pathlib import Path
import environ

# Initialize environment variables
env = environ.Env(
    # Set default values
    DEBUG=(bool, False),
    LOG_LEVEL=(str, "INFO"),
)

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent

# Take environment variables from .env file
environ.Env.read_env(os.path.join(BASE_DIR, ".env"))

SECRET_KEY = env("SECRET_KEY", default="django-insecure-key-for-development")

DEBUG = env("DEBUG")

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",

    # Third-party apps
    "rest_framework",

    # Local apps
    "utils",
    "scenarios",
    "channel",
    "covertness",
    "surrogate",
    "conic",
    "subproblems",
    "orchestrator",
    "harness",
]

# The optimizer keeps no persistent state
DATABASES = {}

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Conic solver settings
CONIC_SOLVER = env("CONIC_SOLVER", default="CLARABEL")
CONIC_FALLBACK_SOLVER = env("CONIC_FALLBACK_SOLVER", default="SCS")
CONIC_MAX_ITERS = env.int("CONIC_MAX_ITERS", default=500)
CONIC_FALLBACK_MAX_ITERS = env.int("CONIC_FALLBACK_MAX_ITERS", default=100000)
# Internal solver accuracy; results are graded against OPTIMIZER_TOL_FEAS
CONIC_ACCURACY = env.float("CONIC_ACCURACY", default=1e-8)

# Optimizer settings (scenario files may override the first three per run)
OPTIMIZER_MAX_OUTER_ITERS = env.int("OPTIMIZER_MAX_OUTER_ITERS", default=30)
OPTIMIZER_TOL_OBJ = env.float("OPTIMIZER_TOL_OBJ", default=1e-4)
OPTIMIZER_TOL_FEAS = env.float("OPTIMIZER_TOL_FEAS", default=1e-6)
OPTIMIZER_RANDOMIZATION_DRAWS = env.int("OPTIMIZER_RANDOMIZATION_DRAWS", default=1000)
OPTIMIZER_RANK_ONE_RATIO = env.float("OPTIMIZER_RANK_ONE_RATIO", default=1e-6)
OPTIMIZER_RANK_ONE_GAP = env.float("OPTIMIZER_RANK_ONE_GAP", default=0.05)
OPTIMIZER_SERVING_SAFETY = env.float("OPTIMIZER_SERVING_SAFETY", default=1.2)
OPTIMIZER_FAIRNESS_MARGIN = env.float("OPTIMIZER_FAIRNESS_MARGIN", default=1e-9)
OPTIMIZER_SOLVER_SAFETY = env.float("OPTIMIZER_SOLVER_SAFETY", default=1e-6)

# Detection oracle settings
ORACLE_MC_TRIALS = env.int("ORACLE_MC_TRIALS", default=100000)
ORACLE_MC_G = env.int("ORACLE_MC_G", default=10000)
ORACLE_LITERAL_SAMPLE_LIMIT = env.int("ORACLE_LITERAL_SAMPLE_LIMIT", default=2000000)

# Sweep settings
SWEEP_EXECUTOR = env("SWEEP_EXECUTOR", default="local")
SWEEP_JOBS = env.int("SWEEP_JOBS", default=1)

# Report settings
CSV_SCHEMA_VERSION = env("CSV_SCHEMA_VERSION", default="1")

# Celery settings
CELERY_BROKER_URL = env("CELERY_BROKER_URL", default="redis://localhost:6379/0")
CELERY_RESULT_BACKEND = env("CELERY_RESULT_BACKEND", default="redis://localhost:6379/0")
CELERY_TASK_ALWAYS_EAGER = env.bool("CELERY_TASK_ALWAYS_EAGER", default=False)
CELERY_TASK_SERIALIZER = "json"
CELERY_RESULT_SERIALIZER = "json"
CELERY_ACCEPT_CONTENT = ["json"]

# Logging
LOG_LEVEL = env("LOG_LEVEL")
LOG_DIR = env("LOG_DIR", default=os.path.join(BASE_DIR, "logs"))

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {process:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "level": LOG_LEVEL,
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
        "file": {
            "level": LOG_LEVEL,
            "class": "logging.FileHandler",
            "filename": os.path.join(LOG_DIR, "optimizer.log"),
            "formatter": "verbose",
        },
    },
    "loggers": {
        app: {
            "handlers": ["console", "file"],
            "level": LOG_LEVEL,
            "propagate": False,
        }
        for app in (
            "utils",
            "scenarios",
            "channel",
            "covertness",
            "surrogate",
            "conic",
            "subproblems",
            "orchestrator",
            "harness",
        )
    },
}

# Create logs directory if it doesn't exist
os.makedirs(LOG_DIR, exist_ok=True)

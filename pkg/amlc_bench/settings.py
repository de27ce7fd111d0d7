import os
from pathlib import Path
from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(BASE_DIR / '.env')


def _env_bool(name, default='False'):
    return os.getenv(name, default).lower() in ('true', '1', 'yes')


SECRET_KEY = os.getenv('SECRET_KEY', 'amlc-bench-local-only')
DEBUG = _env_bool('DEBUG')
ALLOWED_HOSTS = [h for h in os.getenv('ALLOWED_HOSTS', 'localhost').split(',') if h]

# Application definition
INSTALLED_APPS = [
    # Local apps
    'learning',
    'datasets',
    'experiments.apps.ExperimentsConfig',

    # Django default apps
    'django.contrib.contenttypes',
    'django.contrib.auth',

    # Third-party apps
    'rest_framework',
]

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.getenv('AMLC_DB_PATH', str(BASE_DIR / 'amlc_bench.sqlite3')),
    }
}

TIME_ZONE = 'UTC'
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

TEST_RUNNER = 'amlc_bench.test_runner.AcceptanceAwareRunner'

# ============================================================
# EXPERIMENT DEFAULTS
# ============================================================

# --workers default for sweep/cv/train
AMLC_DEFAULT_WORKERS = int(os.getenv('AMLC_DEFAULT_WORKERS', '1'))

# b = 1 for every experiment, 10 shuffles, 10-fold CV over 20 values of C
AMLC_DEFAULT_B = float(os.getenv('AMLC_DEFAULT_B', '1.0'))
AMLC_DEFAULT_SEEDS = int(os.getenv('AMLC_DEFAULT_SEEDS', '10'))
AMLC_DEFAULT_FOLDS = int(os.getenv('AMLC_DEFAULT_FOLDS', '10'))
AMLC_C_GRID_MIN_EXP = float(os.getenv('AMLC_C_GRID_MIN_EXP', '-4'))
AMLC_C_GRID_MAX_EXP = float(os.getenv('AMLC_C_GRID_MAX_EXP', '2'))
AMLC_C_GRID_SIZE = int(os.getenv('AMLC_C_GRID_SIZE', '20'))

AMLC_REPORT_DIR = Path(os.getenv('AMLC_REPORT_DIR', str(BASE_DIR / 'reports')))

# Distributes sweep/cv cells over Celery workers when --backend celery is used
AMLC_CELERY_ENABLED = _env_bool('AMLC_CELERY_ENABLED')

# Celery (Redis)
CELERY_TASK_TRACK_STARTED = True
CELERY_TASK_TIME_LIMIT = 60 * 60
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_BROKER_URL = os.getenv('CELERY_BROKER_URL', 'redis://localhost:6379/0')
CELERY_RESULT_BACKEND = os.getenv('CELERY_RESULT_BACKEND', CELERY_BROKER_URL)
CELERY_WORKER_LOG_LEVEL = os.getenv('CELERY_WORKER_LOG_LEVEL', 'INFO')
CELERY_TASK_QUEUES = {
    'default': {'exchange': 'default', 'routing_key': 'default'},
    'cells': {'exchange': 'cells', 'routing_key': 'cells'},
}
CELERY_TASK_ROUTES = {
    'experiments.run_cell': {'queue': 'cells'},
}

# Logging Configuration with Celery Support
LOG_LEVEL = os.getenv('AMLC_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '[{levelname}] {asctime} {name} {message}',
            'style': '{',
            'datefmt': '%Y-%m-%d %H:%M:%S',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
            'level': 'DEBUG',
        },
    },
    'loggers': {
        '': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        'celery': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        'celery.task': {
            'handlers': ['console'],
            'level': 'DEBUG',
            'propagate': False,
        },
        # Application-specific loggers
        'core': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'learning': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'datasets': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'experiments': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

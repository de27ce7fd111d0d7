from .settings import *  # noqa: F401,F403

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': ':memory:',
    }
}

CELERY_TASK_ALWAYS_EAGER = True
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_BROKER_URL = 'memory://'
CELERY_RESULT_BACKEND = 'cache+memory://'

AMLC_DEFAULT_WORKERS = 1

LOGGING['loggers']['learning']['level'] = 'WARNING'  # noqa: F405
LOGGING['loggers']['datasets']['level'] = 'WARNING'  # noqa: F405
LOGGING['loggers']['experiments']['level'] = 'WARNING'  # noqa: F405

"""
Django settings for the spiral-chaos toolkit.

The project has no database and no web surface: Django provides the
settings layer, the management-command CLI and the test runner.
"""
from pathlib import Path
import os
from dotenv import load_dotenv


BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(BASE_DIR / '.env')


SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'toolkit-local-only')

DEBUG = os.getenv('DJANGO_DEBUG', 'false').lower() == 'true'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    'rest_framework',

    'dynamics',
    'toolkit',
]

DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_TZ = True
TIME_ZONE = 'UTC'


def _env_float(key, default):
    value = os.getenv(f'DYNAMICS_{key}')
    return float(value) if value is not None else default


def _env_int(key, default):
    value = os.getenv(f'DYNAMICS_{key}')
    return int(value) if value is not None else default


# Numerical defaults. Every key can be overridden with DYNAMICS_<KEY>.
DYNAMICS = {
    'RTOL': _env_float('RTOL', 1e-9),
    'ATOL': _env_float('ATOL', 1e-12),
    'SWEEP_RTOL': _env_float('SWEEP_RTOL', 1e-7),
    'ESCAPE_RADIUS': _env_float('ESCAPE_RADIUS', 1e3),
    'MAX_STEPS': _env_int('MAX_STEPS', 2_000_000),
    'FLOW_HORIZON': _env_float('FLOW_HORIZON', 2e4),
    'MAP_ITERATES': _env_int('MAP_ITERATES', 1_000_000),
    'TRANSIENT_FRACTION': _env_float('TRANSIENT_FRACTION', 0.2),
    'SEED': _env_int('SEED', 20220101),
    'JOBS': _env_int('JOBS', 1),
    'OUT_DIR': os.getenv('DYNAMICS_OUT_DIR', str(BASE_DIR / 'out')),
}

TOOL_VERSION = '1.0.0'


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'dynamics': {
            'handlers': ['console'],
            'level': os.getenv('DYNAMICS_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
        'toolkit': {
            'handlers': ['console'],
            'level': os.getenv('DYNAMICS_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}

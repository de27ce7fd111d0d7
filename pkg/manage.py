#!/usr/bin/env python
"""Django's command-line utility for administrative tasks and experiments."""
import os
import sys


def main():
    """Run administrative tasks."""
    default_settings = 'amlc_bench.test_settings' if sys.argv[1:2] == ['test'] else 'amlc_bench.settings'
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', default_settings)
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()

#!/usr/bin/env python
"""Project entry point.

Runs the toolkit subcommands (``python manage.py sweep ...``) and the test
suite (``python manage.py test --exclude-tag slow``).
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'app.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install the packages in requirements.txt "
            "into the active environment."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()

"""Single entry point: ``python -m toolkit <subcommand> [options]``."""
import os
import sys

SUBCOMMANDS = (
    'systems', 'simulate', 'equilibria', 'cycle', 'lyapunov',
    'manifold', 'homoclinic', 'sweep', 'scenario', 'plot',
)

USAGE = f"usage: python -m toolkit {{{','.join(SUBCOMMANDS)}}} [options]\n"


def dispatch(argv=None):
    """Run one subcommand and return its exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in SUBCOMMANDS:
        sys.stderr.write(USAGE)
        return 2

    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'app.settings')
    import django
    from django.core.management import load_command_class

    django.setup()
    command = load_command_class('toolkit', argv[0])
    try:
        command.run_from_argv(['toolkit', *argv])
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return 0

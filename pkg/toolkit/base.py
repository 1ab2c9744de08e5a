"""Shared option handling and error translation for the toolkit commands."""
import logging
from pathlib import Path

import numpy as np
import yaml
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from dynamics.exceptions import DynamicsError, NotFound, SectionError, StiffnessError
from dynamics.sweep import SweepOptions
from dynamics.systems import get_system

from .serializers import RunConfigSerializer
from .utils import dumps, out_dir

logger = logging.getLogger(__name__)

NOT_FOUND_EXIT = 1
USAGE_EXIT = 2
VIOLATION_EXIT = 3

SHORT_PARAMS = ('mu', 'beta', 'A', 'B', 'C', 'M1', 'M2')


def parse_param(text):
    name, sep, value = text.partition('=')
    if not sep or not name:
        raise CommandError(f"--param expects name=value, got '{text}'", returncode=USAGE_EXIT)
    try:
        return name.strip(), float(value)
    except ValueError:
        raise CommandError(f"--param {name} needs a real value, got '{value}'", returncode=USAGE_EXIT)


def load_config_file(path):
    try:
        data = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise CommandError(f'Cannot read config {path}: {exc}', returncode=USAGE_EXIT)
    if not isinstance(data, dict):
        raise CommandError(f'Config {path} must be a key-value mapping', returncode=USAGE_EXIT)
    return data


class DynamicsCommand(BaseCommand):
    """
    Base for every subcommand: resolves the run config from a YAML file plus
    flags, validates it, and turns toolkit errors into exit codes.
    """
    needs_system = True
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('--config', help='YAML run config; flags override its values')
        if self.needs_system:
            parser.add_argument('--system', help='Registered system name')
            parser.add_argument('--demo', help='Named demo parameter set of the system')
            parser.add_argument('--param', action='append', default=[], metavar='NAME=VALUE',
                                help='Parameter override (repeatable)')
            for name in SHORT_PARAMS:
                parser.add_argument(f'--{name}', type=float, dest=f'param_{name}', metavar='VALUE')
        parser.add_argument('--out', help='Artifact directory')
        parser.add_argument('--jobs', type=int, help='Worker processes')
        parser.add_argument('--seed', type=int, help='Seed recorded in the provenance header')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def resolve_config(self, options):
        config = load_config_file(options['config']) if options.get('config') else {}
        params = dict(config.pop('params', None) or {})
        for key, value in options.items():
            if key.startswith('param_') and value is not None:
                params[key[len('param_'):]] = value
        for text in options.get('param') or []:
            name, value = parse_param(text)
            params[name] = value
        for key in RunConfigSerializer().fields:
            if key == 'params':
                continue
            value = options.get(key)
            if value is not None and value != []:
                config[key] = value
        if params:
            config['params'] = params
        config.setdefault('jobs', settings.DYNAMICS['JOBS'])
        config.setdefault('seed', settings.DYNAMICS['SEED'])

        serializer = RunConfigSerializer(data=config)
        if not serializer.is_valid():
            raise CommandError(f'Invalid configuration: {dumps(serializer.errors)}', returncode=USAGE_EXIT)
        return dict(serializer.validated_data)

    def resolve_system(self, config):
        if 'system' not in config:
            raise CommandError('--system is required', returncode=USAGE_EXIT)
        system = get_system(config['system'])
        values = dict(system.demos.get(config['demo'], {})) if config.get('demo') else {}
        values.update(config.get('params', {}))
        return system, system.params(values)

    def require(self, config, *keys):
        missing = [k for k in keys if k not in config]
        if missing:
            flags = ', '.join('--' + k.replace('_', '-') for k in missing)
            raise CommandError(f'Missing required option(s): {flags}', returncode=USAGE_EXIT)

    def emit(self, payload):
        self.stdout.write(dumps(payload))

    def handle(self, *args, **options):
        self.config = self.resolve_config(options)
        self.out = out_dir(self.config.get('out'))
        try:
            if self.needs_system:
                self.system, self.params = self.resolve_system(self.config)
                self.config['params'] = self.params.as_dict()
            self.run(self.config)
        except (NotFound, StiffnessError, SectionError) as exc:
            error = exc.as_dict() if isinstance(exc, NotFound) else {'error': type(exc).__name__, 'message': str(exc)}
            self.emit({'status': 'error', **error})
            raise CommandError(str(exc), returncode=NOT_FOUND_EXIT)
        except DynamicsError as exc:
            raise CommandError(f'{type(exc).__name__}: {exc}', returncode=USAGE_EXIT)

    def run(self, config):
        raise NotImplementedError

    def start_state(self, config):
        return np.asarray(config['x0'], dtype=float) if 'x0' in config else None

    def sweep_options(self, config):
        options = SweepOptions(horizon=config.get('horizon'), iterates=config.get('iterates'))
        if 'samples' in config:
            options.distance_samples = config['samples']
            options.diagram_samples = config['samples']
        return options

    def grid_values(self, config):
        start, stop, num = config['grid']
        return np.linspace(start, stop, int(num))

    def success(self, message, data, **extra):
        self.emit({'status': 'success', 'message': message, 'data': data, **extra})

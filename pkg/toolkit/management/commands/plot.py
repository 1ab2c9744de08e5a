from pathlib import Path

from django.core.management.base import CommandError

from toolkit.base import USAGE_EXIT, DynamicsCommand
from toolkit.utils import plot_diagram, plot_projection, read_csv


class Command(DynamicsCommand):
    help = 'Render a trajectory CSV projection or a bifurcation-diagram CSV as SVG'
    needs_system = False

    def add_command_arguments(self, parser):
        parser.add_argument('--input', help='CSV written by simulate, cycle, manifold or sweep')
        parser.add_argument('--proj', choices=['xy', 'xz', 'yz'])

    def run(self, config):
        self.require(config, 'input')
        source = Path(config['input'])
        try:
            header, table = read_csv(source)
        except (OSError, StopIteration, ValueError) as exc:
            raise CommandError(f'Cannot read {source}: {exc}', returncode=USAGE_EXIT)
        target = self.out / f'{source.stem}.svg'

        if header == ['value', 'x']:
            plot_diagram(target, table, 'parameter', config, source.stem)
        elif {'x', 'y', 'z'} <= set(header):
            columns = [header.index(c) for c in ('x', 'y', 'z')]
            plot_projection(target, table[:, columns], config.get('proj', 'xz'), config, source.stem)
        else:
            raise CommandError(f'{source} has neither x, y, z columns nor a value, x diagram', returncode=USAGE_EXIT)
        self.success(f'Wrote {target.name}', {'svg': str(target), 'rows': len(table)})

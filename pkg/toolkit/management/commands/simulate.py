import logging

from dynamics.integrate import IntegratorConfig, integrate, iterate_map
from dynamics.sweep import cold_seed
from dynamics.systems import FLOW
from toolkit.base import DynamicsCommand
from toolkit.utils import plot_points, plot_projection, write_csv

logger = logging.getLogger(__name__)


class Command(DynamicsCommand):
    help = 'Integrate a flow or iterate a map and write the orbit as CSV and SVG'

    def add_command_arguments(self, parser):
        parser.add_argument('--x0', type=float, nargs=3, metavar=('X', 'Y', 'Z'))
        parser.add_argument('--t-end', type=float, help='Signed integration time (flows)')
        parser.add_argument('--iterates', type=int, help='Number of iterates (maps)')
        parser.add_argument('--rtol', type=float)
        parser.add_argument('--atol', type=float)
        parser.add_argument('--proj', choices=['xy', 'xz', 'yz'])

    def run(self, config):
        system, params = self.system, self.params
        x0 = self.start_state(config)
        if x0 is None:
            x0 = cold_seed(system, params)
        proj = config.get('proj', 'xz')
        title = f'{system.name} {params.as_dict()}'

        if system.kind == FLOW:
            cfg = IntegratorConfig.for_system(system, params, rtol=config.get('rtol'), atol=config.get('atol'))
            run = integrate(system, x0, params, config.get('t_end', 100.0), cfg)
            header = ['t', 'x', 'y', 'z']
            rows = list(run.rows())
            plot_projection(self.out / 'trajectory.svg', run.states, proj, config, title)
        else:
            run = iterate_map(system, x0, params, config.get('iterates', 10_000))
            header = ['n', 'x', 'y', 'z']
            rows = [(n, *state) for n, state in enumerate(run.y)]
            plot_points(self.out / 'trajectory.svg', run.y, proj, config, title)
        write_csv(self.out / 'trajectory.csv', header, rows, config)
        logger.info(f'{system.name}: {len(rows)} states, {run.status}')
        self.success('Orbit computed', {
            'status': run.status,
            'points': len(rows),
            'final': run.final[:3],
        })

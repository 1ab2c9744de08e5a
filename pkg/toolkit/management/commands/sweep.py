from dynamics.sweep import OBSERVABLES, sweep
from toolkit.base import DynamicsCommand
from toolkit.utils import plot_diagram, write_csv

SWEEP_HEADER = ['value', 'class', 'lambda1', 'd_min', 'components', 'flags']


class Command(DynamicsCommand):
    help = 'Sweep one parameter over a grid; rows in grid order, optional bifurcation diagram'

    def add_command_arguments(self, parser):
        parser.add_argument('--varying')
        parser.add_argument('--grid', type=float, nargs=3, metavar=('START', 'STOP', 'NUM'))
        parser.add_argument('--observables', nargs='*', choices=OBSERVABLES)
        parser.add_argument('--horizon', type=float)
        parser.add_argument('--iterates', type=int)
        parser.add_argument('--samples', type=int)

    def run(self, config):
        self.require(config, 'varying', 'grid')
        varying = config['varying']
        rows = sweep(self.system, self.params, varying, self.grid_values(config),
                     config.get('observables', []), config['jobs'], self.sweep_options(config))
        write_csv(self.out / 'sweep.csv', [varying, *SWEEP_HEADER[1:]],
                  [(r.value, r.tag, r.lambda1, r.d_min, r.components, ';'.join(r.flags)) for r in rows], config)
        if 'diagram' in config.get('observables', []):
            pairs = [(r.value, v) for r in rows for v in r.samples]
            write_csv(self.out / 'diagram.csv', ['value', 'x'], pairs, config)
            plot_diagram(self.out / 'diagram.svg', pairs, varying, config, f'{self.system.name} bifurcation diagram')
        data = [{'value': r.value, 'class': r.tag, 'lambda1': r.lambda1, 'components': r.components,
                 'flags': r.flags} for r in rows]
        self.success(f'{len(rows)} sweep rows', data)

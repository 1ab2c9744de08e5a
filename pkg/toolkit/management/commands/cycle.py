from dynamics.cycles import (
    cycle_seed, locate_node_focus_transition, locate_period_doubling, map_cycle_multipliers,
    refine_cycle, sample_cycle,
)
from dynamics.systems import FLOW
from toolkit.base import DynamicsCommand
from toolkit.serializers import ComplexField, LocatedSerializer, PeriodicOrbitSerializer
from toolkit.utils import plot_projection, write_csv, write_json


class Command(DynamicsCommand):
    help = 'Refine a periodic orbit and its multipliers, or locate cycle bifurcations'

    def add_command_arguments(self, parser):
        parser.add_argument('--x0', type=float, nargs=3, metavar=('X', 'Y', 'Z'),
                            help='Initial guess (flows) or periodic point (maps)')
        parser.add_argument('--crossings', type=int, help='Section crossings per period')
        parser.add_argument('--period', type=int, help='Period of a map periodic point')
        parser.add_argument('--locate', choices=['node-focus', 'period-doubling'])
        parser.add_argument('--varying')
        parser.add_argument('--range', type=float, nargs=2, metavar=('LO', 'HI'))
        parser.add_argument('--tol', type=float)
        parser.add_argument('--proj', choices=['xy', 'xz', 'yz'])

    def run(self, config):
        system, params = self.system, self.params
        if system.kind != FLOW:
            self.require(config, 'x0', 'period')
            spectrum = map_cycle_multipliers(system, config['x0'], config['period'], params)
            data = {
                'period': config['period'],
                'multipliers': [ComplexField().to_representation(v) for v in spectrum],
            }
            write_json(self.out / 'cycle.json', data, config)
            self.success(f'Multipliers of a period-{config["period"]} point', data)
            return

        crossings = config.get('crossings', 1)
        if config.get('locate'):
            self.require(config, 'varying', 'range')
            locate = locate_node_focus_transition if config['locate'] == 'node-focus' else locate_period_doubling
            located = locate(system, params, config['varying'], config['range'],
                             tol=config.get('tol', 1e-4), crossings=crossings)
            data = LocatedSerializer(located).data
            write_json(self.out / f'{config["locate"]}.json', data, config)
            self.success(f'{located.label} located', data)
            return

        guess = self.start_state(config)
        if guess is None:
            guess = cycle_seed(system, params)
        orbit = refine_cycle(system, guess, params, crossings=crossings)
        data = PeriodicOrbitSerializer(orbit).data
        loop = sample_cycle(system, params, orbit)
        write_json(self.out / 'cycle.json', data, config)
        write_csv(self.out / 'cycle.csv', ['x', 'y', 'z'], loop, config)
        plot_projection(self.out / 'cycle.svg', loop, config.get('proj', 'xz'), config,
                        f'{system.name} cycle T={orbit.period:.6g}')
        self.success(f'{orbit.stability} cycle refined', data)

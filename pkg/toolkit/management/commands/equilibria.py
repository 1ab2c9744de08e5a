from dynamics.equilibria import find_equilibria, locate_hopf, locate_ns_and_fold
from dynamics.systems import FLOW
from toolkit.base import DynamicsCommand
from toolkit.serializers import EquilibriumSerializer, LocatedSerializer
from toolkit.utils import write_json


class Command(DynamicsCommand):
    help = 'Find and classify equilibria or fixed points, or locate where they lose stability'

    def add_command_arguments(self, parser):
        parser.add_argument('--locate', choices=['hopf', 'boundaries'],
                            help='Andronov-Hopf (flows) or fold/flip/Neimark-Sacker boundaries (maps)')
        parser.add_argument('--varying', help='Parameter to vary while locating')
        parser.add_argument('--range', type=float, nargs=2, metavar=('LO', 'HI'))
        parser.add_argument('--tol', type=float)
        parser.add_argument('--samples', type=int, help='Number of Newton seeds')

    def run(self, config):
        system, params = self.system, self.params
        if not config.get('locate'):
            found = find_equilibria(system, params, n_seeds=config.get('samples', 64))
            data = EquilibriumSerializer(found, many=True).data
            write_json(self.out / 'equilibria.json', {'equilibria': data}, config)
            self.success(f'{len(found)} equilibria of {system.name}', data)
            return

        self.require(config, 'varying', 'range')
        tol = config.get('tol', 1e-6)
        if system.kind == FLOW:
            located = [locate_hopf(system, params, config['varying'], config['range'], tol)]
        else:
            located = locate_ns_and_fold(system, params, config['varying'], config['range'], tol)
        data = LocatedSerializer(located, many=True).data
        write_json(self.out / 'boundaries.json', {'located': data}, config)
        self.success(f'{len(located)} stability boundaries located', data)

from dynamics import chaos
from dynamics.exceptions import PreconditionError
from dynamics.integrate import iterate_map
from dynamics.sweep import cold_seed
from dynamics.systems import FLOW
from toolkit.base import DynamicsCommand
from toolkit.serializers import AttractorClassSerializer, LyapunovSerializer
from toolkit.utils import write_json


class Command(DynamicsCommand):
    help = 'Lyapunov spectrum and attractor class of the orbit started at x0'

    def add_command_arguments(self, parser):
        parser.add_argument('--x0', type=float, nargs=3, metavar=('X', 'Y', 'Z'))
        parser.add_argument('--horizon', type=float, help='Integration time (flows)')
        parser.add_argument('--iterates', type=int, help='Number of iterates (maps)')

    def run(self, config):
        system, params = self.system, self.params
        x0 = self.start_state(config)
        if x0 is None:
            x0 = cold_seed(system, params)

        orbit = None
        if system.kind == FLOW:
            result = chaos.lyapunov_flow(system, params, x0, horizon=config.get('horizon'))
        else:
            result = chaos.lyapunov_map(system, params, x0, iterates=config.get('iterates'))
            if not result.diverged:
                orbit = iterate_map(system, result.endpoint, params, chaos.CHAIN_SAMPLES).y
        attractor = chaos.classify_attractor(system, params, orbit, result)

        data = {
            'lyapunov': LyapunovSerializer(result).data,
            'attractor': AttractorClassSerializer(attractor).data,
        }
        if attractor.tag == chaos.INVARIANT_CURVE and orbit is not None:
            try:
                k, closed = chaos.count_curve_components(system, params, orbit)
                data['components'] = {'count': k, 'closed': closed}
            except PreconditionError as exc:
                data['components'] = {'count': None, 'reason': str(exc)}
        write_json(self.out / 'lyapunov.json', data, config)
        self.success(f'{attractor.tag} attractor', data)

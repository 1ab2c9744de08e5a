from dynamics.equilibria import tracked_equilibrium
from dynamics.manifolds import grow_unstable_surface, track_separatrix
from toolkit.base import DynamicsCommand
from toolkit.serializers import EquilibriumSerializer
from toolkit.utils import plot_fan, plot_projection, write_csv, write_json


class Command(DynamicsCommand):
    help = 'One-dimensional separatrix or fan-grown two-dimensional unstable manifold of a saddle-focus'

    def add_command_arguments(self, parser):
        parser.add_argument('--which', choices=['stable', 'unstable', 'surface'])
        parser.add_argument('--side', type=int, choices=[1, -1])
        parser.add_argument('--x0', type=float, nargs=3, metavar=('X', 'Y', 'Z'),
                            help='Guess for the equilibrium (default: the tracked one)')
        parser.add_argument('--fan', type=int, help='Trajectories in the surface fan')
        parser.add_argument('--horizon', type=float, help='Fan integration time')
        parser.add_argument('--proj', choices=['xy', 'xz', 'yz'])

    def run(self, config):
        system, params = self.system, self.params
        eq = tracked_equilibrium(system, params, self.start_state(config))
        which = config.get('which', 'stable')
        proj = config.get('proj', 'xz')

        if which == 'surface':
            surface = grow_unstable_surface(system, params, eq, n=config.get('fan', 32),
                                            horizon=config.get('horizon', 600.0), jobs=config['jobs'])
            rows = [(i, t, *state[:3]) for i, run in enumerate(surface.rings) for t, state in zip(run.t, run.y)]
            write_csv(self.out / 'manifold.csv', ['trajectory', 't', 'x', 'y', 'z'], rows, config)
            plot_fan(self.out / 'manifold.svg', surface.rings, proj, config, f'{system.name} unstable surface')
            data = {'equilibrium': EquilibriumSerializer(eq).data, 'trajectories': surface.count,
                    'horizon': surface.horizon, 'delta': surface.delta}
        else:
            sep = track_separatrix(system, params, eq, which, config.get('side', 1))
            write_csv(self.out / 'manifold.csv', ['x', 'y', 'z'], sep.points, config)
            plot_projection(self.out / 'manifold.svg', sep.points, proj, config,
                            f'{system.name} {which} separatrix, side {sep.side:+d}')
            data = {'equilibrium': EquilibriumSerializer(eq).data, 'status': sep.status,
                    'arc_length': sep.arc_length, 'side': sep.side, 'points': len(sep.points)}
        write_json(self.out / 'manifold.json', data, config)
        self.success(f'{which} manifold computed', data)

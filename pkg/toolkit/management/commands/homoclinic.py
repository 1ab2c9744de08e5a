from dynamics.homoclinic import (
    LOOP_METHODS, THRESHOLD, detect_shilnikov_attractor, locate_homoclinic_12, locate_homoclinic_21,
)
from dynamics.sweep import sweep
from toolkit.base import DynamicsCommand
from toolkit.serializers import HomoclinicDiagnosticSerializer, LocatedSerializer
from toolkit.utils import write_csv, write_json


class Command(DynamicsCommand):
    help = 'Locate homoclinic loops of saddle-foci or diagnose a homoclinic attractor'

    def add_command_arguments(self, parser):
        parser.add_argument('--locate', choices=['12', '21'], help='Loop of a (1,2) or a (2,1) saddle-focus')
        parser.add_argument('--varying')
        parser.add_argument('--range', type=float, nargs=2, metavar=('LO', 'HI'))
        parser.add_argument('--tol', type=float)
        parser.add_argument('--method', choices=LOOP_METHODS,
                            help='How a (1,2) loop is detected: separatrix outcome, attractor distance, or both')
        parser.add_argument('--grid', type=float, nargs=3, metavar=('START', 'STOP', 'NUM'),
                            help='Write the d_min curve over this grid instead of a single diagnostic')
        parser.add_argument('--threshold', type=float)
        parser.add_argument('--transient', type=float)
        parser.add_argument('--samples', type=int)
        parser.add_argument('--horizon', type=float)
        parser.add_argument('--iterates', type=int)

    def run(self, config):
        system, params = self.system, self.params
        if config.get('locate'):
            self.require(config, 'varying', 'range')
            locate = locate_homoclinic_12 if config['locate'] == '12' else locate_homoclinic_21
            kwargs = {'method': config['method']} if config['locate'] == '12' and 'method' in config else {}
            located = locate(system, params, config['varying'], config['range'], tol=config.get('tol', 1e-4), **kwargs)
            data = LocatedSerializer(located).data
            write_json(self.out / 'homoclinic.json', data, config)
            self.success(f'{located.label} located', data)
            return

        if 'grid' in config:
            self.require(config, 'varying')
            rows = sweep(system, params, config['varying'], self.grid_values(config),
                         ('lyapunov', 'distance'), config['jobs'], self.sweep_options(config))
            write_csv(self.out / 'distance.csv', [config['varying'], 'class', 'lambda1', 'd_min', 'flags'],
                      [(r.value, r.tag, r.lambda1, r.d_min, ';'.join(r.flags)) for r in rows], config)
            data = [{'value': r.value, 'class': r.tag, 'd_min': r.d_min} for r in rows]
            self.success(f'd_min over {len(rows)} grid points', data)
            return

        kwargs = {k: config[k] for k in ('transient', 'horizon', 'iterates') if k in config}
        if 'samples' in config:
            kwargs['n_samples'] = config['samples']
        diagnostic = detect_shilnikov_attractor(system, params, threshold=config.get('threshold', THRESHOLD), **kwargs)
        data = HomoclinicDiagnosticSerializer(diagnostic).data
        write_json(self.out / 'homoclinic.json', data, config)
        self.success('Homoclinic attractor' if diagnostic.homoclinic_attractor else 'No homoclinic attractor', data)

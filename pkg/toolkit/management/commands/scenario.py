from django.core.management.base import CommandError

from dynamics.sweep import SCENARIOS, scenario_report
from toolkit.base import VIOLATION_EXIT, DynamicsCommand
from toolkit.serializers import ScenarioReportSerializer
from toolkit.utils import write_json


class Command(DynamicsCommand):
    help = 'Locate every stage of a preset scenario and check the stage ordering'
    needs_system = False

    def add_command_arguments(self, parser):
        parser.add_argument('--preset', choices=sorted(SCENARIOS))
        parser.add_argument('--horizon', type=float)
        parser.add_argument('--iterates', type=int)
        parser.add_argument('--samples', type=int)

    def run(self, config):
        self.require(config, 'preset')
        report = scenario_report(config['preset'], config['jobs'], self.sweep_options(config))
        data = ScenarioReportSerializer(report).data
        write_json(self.out / f'scenario-{report.preset}.json', data, config)
        if not report.ok:
            self.emit({'status': 'error', 'message': 'Scenario stage ordering violated', 'data': data})
            raise CommandError('; '.join(report.violations), returncode=VIOLATION_EXIT)
        self.success(f'{report.preset} scenario reproduced', data)

from dynamics.systems import list_systems
from toolkit.base import DynamicsCommand
from toolkit.serializers import SystemSerializer
from toolkit.utils import write_json


class Command(DynamicsCommand):
    help = 'List the registered flows and maps with their parameters, defaults and boxes'
    needs_system = False

    def run(self, config):
        data = SystemSerializer(list_systems(), many=True).data
        write_json(self.out / 'systems.json', {'systems': data}, config)
        self.success('Registered systems', data)

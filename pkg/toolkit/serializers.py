from rest_framework import serializers

from dynamics.sweep import OBSERVABLES, SCENARIOS
from dynamics.systems import SYSTEMS


class RunConfigSerializer(serializers.Serializer):
    """Flat run configuration; keys mirror the command-line flags."""
    system = serializers.ChoiceField(choices=sorted(SYSTEMS), required=False)
    params = serializers.DictField(child=serializers.FloatField(), required=False)
    preset = serializers.ChoiceField(choices=sorted(SCENARIOS), required=False)
    demo = serializers.CharField(required=False)
    x0 = serializers.ListField(child=serializers.FloatField(), min_length=3, max_length=3, required=False)
    t_end = serializers.FloatField(required=False)
    iterates = serializers.IntegerField(min_value=1, required=False)
    horizon = serializers.FloatField(min_value=0, required=False)
    transient = serializers.FloatField(min_value=0, required=False)
    samples = serializers.IntegerField(min_value=1, required=False)
    rtol = serializers.FloatField(min_value=0, required=False)
    atol = serializers.FloatField(min_value=0, required=False)
    tol = serializers.FloatField(min_value=0, required=False)
    varying = serializers.CharField(required=False)
    range = serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2, required=False)
    grid = serializers.ListField(child=serializers.FloatField(), min_length=3, max_length=3, required=False)
    observables = serializers.ListField(
        child=serializers.ChoiceField(choices=OBSERVABLES), required=False,
    )
    locate = serializers.CharField(required=False)
    which = serializers.ChoiceField(choices=['stable', 'unstable', 'surface'], required=False)
    side = serializers.ChoiceField(choices=[1, -1], required=False)
    crossings = serializers.IntegerField(min_value=1, required=False)
    period = serializers.IntegerField(min_value=1, required=False)
    fan = serializers.IntegerField(min_value=16, required=False)
    threshold = serializers.FloatField(min_value=0, required=False)
    proj = serializers.ChoiceField(choices=['xy', 'xz', 'yz'], required=False)
    input = serializers.CharField(required=False)
    out = serializers.CharField(required=False)
    jobs = serializers.IntegerField(min_value=1, required=False)
    seed = serializers.IntegerField(required=False)

    def to_internal_value(self, data):
        unknown = set(data) - set(self.fields)
        if unknown:
            raise serializers.ValidationError({key: ['Unknown configuration key.'] for key in sorted(unknown)})
        return super().to_internal_value(data)

    def validate_range(self, value):
        if value[0] >= value[1]:
            raise serializers.ValidationError('Range must be increasing.')
        return value

    def validate_grid(self, value):
        start, stop, num = value
        if num < 1 or num != int(num):
            raise serializers.ValidationError('Grid is start, stop, number of points.')
        if num > 1 and start == stop:
            raise serializers.ValidationError('Grid must be strictly monotone.')
        return value

    def validate(self, attrs):
        system = attrs.get('system')
        if system and attrs.get('demo'):
            demos = SYSTEMS[system].demos
            if attrs['demo'] not in demos:
                raise serializers.ValidationError(
                    {'demo': [f"Unknown demo for {system}. Available: {', '.join(sorted(demos)) or 'none'}"]}
                )
        if system and attrs.get('varying') and attrs['varying'] not in SYSTEMS[system].parameters:
            raise serializers.ValidationError({'varying': [f'{system} has no parameter {attrs["varying"]}.']})
        return attrs


class ComplexField(serializers.Field):
    """A complex number as its [real, imag] pair."""

    def to_representation(self, value):
        return [float(value.real), float(value.imag)]


class SystemSerializer(serializers.Serializer):
    name = serializers.CharField()
    kind = serializers.CharField()
    parameters = serializers.ListField(child=serializers.CharField())
    defaults = serializers.DictField(child=serializers.FloatField())
    box = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))
    description = serializers.CharField()
    demos = serializers.DictField()


class EquilibriumSerializer(serializers.Serializer):
    state = serializers.ListField(child=serializers.FloatField())
    eigenvalues = serializers.ListField(child=ComplexField(), source='spectrum.values')
    sigma = serializers.FloatField(source='cls.sigma', allow_null=True)
    orientation = serializers.IntegerField(source='cls.orientation', allow_null=True)
    residual = serializers.FloatField()

    def get_fields(self):
        fields = super().get_fields()
        fields['class'] = serializers.CharField(source='cls.tag')
        return fields


class LocatedSerializer(serializers.Serializer):
    label = serializers.CharField()
    value = serializers.FloatField()
    bracket = serializers.ListField(child=serializers.FloatField())
    tag = serializers.CharField(allow_null=True)
    details = serializers.DictField()


class PeriodicOrbitSerializer(serializers.Serializer):
    anchor = serializers.ListField(child=serializers.FloatField())
    period = serializers.FloatField()
    multipliers = serializers.ListField(child=ComplexField())
    trivial_multiplier = ComplexField()
    stability = serializers.CharField()
    focal = serializers.BooleanField()
    residual = serializers.FloatField()
    crossings = serializers.IntegerField()


class LyapunovSerializer(serializers.Serializer):
    exponents = serializers.ListField(child=serializers.FloatField(allow_null=True))
    drift = serializers.FloatField()
    span = serializers.FloatField()
    status = serializers.CharField()
    divergence_residual = serializers.FloatField(allow_null=True)


class AttractorClassSerializer(serializers.Serializer):
    tag = serializers.CharField()
    evidence = serializers.DictField()


class HomoclinicDiagnosticSerializer(serializers.Serializer):
    params = serializers.DictField(child=serializers.FloatField())
    d_min = serializers.FloatField()
    attractor = AttractorClassSerializer()
    homoclinic_attractor = serializers.BooleanField()
    orientation = serializers.IntegerField(allow_null=True)
    exponents = serializers.ListField(child=serializers.FloatField(), allow_null=True)


class StageSerializer(serializers.Serializer):
    name = serializers.CharField()
    status = serializers.CharField()
    value = serializers.FloatField(allow_null=True)
    bracket = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    tag = serializers.CharField(allow_null=True)
    details = serializers.DictField()


class ScenarioReportSerializer(serializers.Serializer):
    preset = serializers.CharField()
    system = serializers.CharField()
    varying = serializers.CharField()
    direction = serializers.IntegerField()
    stages = StageSerializer(many=True)
    gaps = serializers.ListField(child=serializers.CharField())
    violations = serializers.ListField(child=serializers.CharField())
    ok = serializers.BooleanField()

"""
Serializers for the harness app.
"""

from rest_framework import serializers

from orchestrator.models import BASELINES

SWEEP_PARAMETERS = ("M", "epsilon", "Gamma", "S_b")


class SweepSpecSerializer(serializers.Serializer):
    """
    Validates a sweep definition.

    ``series_parameter`` adds an optional second axis, e.g. one M sweep per
    power budget.
    """

    parameter = serializers.ChoiceField(choices=SWEEP_PARAMETERS)
    values = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    series_parameter = serializers.ChoiceField(choices=SWEEP_PARAMETERS, required=False, allow_null=True)
    series_values = serializers.ListField(child=serializers.FloatField(), required=False, default=list)
    baselines = serializers.ListField(
        child=serializers.ChoiceField(choices=BASELINES), allow_empty=False, default=lambda: ["noma"]
    )
    seed = serializers.IntegerField(min_value=0, default=0)
    repetitions = serializers.IntegerField(min_value=1, default=1)

    @staticmethod
    def _check_values(name, values):
        for value in values:
            if name == "M" and (value != int(value) or value < 2):
                raise serializers.ValidationError(f"M values must be integers >= 2, got {value}")
            if name == "epsilon" and not 0.0 < value < 1.0:
                raise serializers.ValidationError(f"epsilon values must lie in (0, 1), got {value}")
            if name == "Gamma" and not value > 0.0:
                raise serializers.ValidationError(f"Gamma values must be positive, got {value}")
            if name == "S_b" and value < 0.0:
                raise serializers.ValidationError(f"S_b values must be non-negative, got {value}")

    def validate(self, attrs):
        try:
            self._check_values(attrs["parameter"], attrs["values"])
        except serializers.ValidationError as e:
            raise serializers.ValidationError({"values": e.detail})

        series = attrs.get("series_parameter")
        if series:
            if series == attrs["parameter"]:
                raise serializers.ValidationError({"series_parameter": ["must differ from parameter"]})
            if not attrs["series_values"]:
                raise serializers.ValidationError({"series_values": ["required with series_parameter"]})
            try:
                self._check_values(series, attrs["series_values"])
            except serializers.ValidationError as e:
                raise serializers.ValidationError({"series_values": e.detail})
        elif attrs["series_values"]:
            raise serializers.ValidationError({"series_parameter": ["required with series_values"]})

        attrs["series_parameter"] = series or None
        return attrs

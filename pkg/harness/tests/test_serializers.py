import json
from pathlib import Path

import pytest

from harness.serializers import SweepSpecSerializer

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def _errors(document):
    serializer = SweepSpecSerializer(data=document)
    assert not serializer.is_valid()
    return serializer.errors


def test_defaults():
    serializer = SweepSpecSerializer(data={"parameter": "epsilon", "values": [0.05, 0.1, 0.3]})
    assert serializer.is_valid(), serializer.errors
    data = serializer.validated_data
    assert data["baselines"] == ["noma"]
    assert data["repetitions"] == 1
    assert data["seed"] == 0
    assert data["series_parameter"] is None


def test_antenna_sweep_with_power_series():
    serializer = SweepSpecSerializer(data={
        "parameter": "M",
        "values": [4, 6, 8, 10],
        "series_parameter": "Gamma",
        "series_values": [10, 20, 30],
    })
    assert serializer.is_valid(), serializer.errors


def test_empty_value_list():
    assert "values" in _errors({"parameter": "M", "values": []})


def test_fractional_antenna_count():
    assert "values" in _errors({"parameter": "M", "values": [4, 4.5]})


def test_epsilon_out_of_range():
    assert "values" in _errors({"parameter": "epsilon", "values": [0.1, 1.0]})


def test_unknown_parameter():
    assert "parameter" in _errors({"parameter": "H", "values": [100.0]})


def test_unknown_baseline():
    assert "baselines" in _errors({"parameter": "S_b", "values": [1e6], "baselines": ["tdma"]})


def test_series_needs_values():
    assert "series_values" in _errors({"parameter": "M", "values": [4], "series_parameter": "Gamma"})


def test_series_must_differ():
    errors = _errors({"parameter": "M", "values": [4], "series_parameter": "M", "series_values": [6]})
    assert "series_parameter" in errors


@pytest.mark.parametrize("path", sorted(FIXTURES.glob("*.json")), ids=lambda p: p.stem)
def test_bundled_sweeps_validate(path):
    serializer = SweepSpecSerializer(data=json.loads(path.read_text(encoding="utf-8")))
    assert serializer.is_valid(), serializer.errors


@pytest.mark.parametrize(
    "stem, parameter, baselines",
    [
        ("covert_demand", "S_b", {"noma", "oma", "no_covertness"}),
        ("paths", "epsilon", {"noma", "straight_line", "random_path"}),
        ("covertness", "epsilon", {"noma", "no_covertness"}),
    ],
)
def test_bundled_sweep_contents(stem, parameter, baselines):
    spec = json.loads((FIXTURES / f"{stem}.json").read_text(encoding="utf-8"))
    assert spec["parameter"] == parameter
    assert set(spec["baselines"]) == baselines
    assert len(spec["values"]) >= 5

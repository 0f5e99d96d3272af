import pytest

from harness.services.report_service import ReportService
from harness.services.sweep_service import SweepService
from utils.helpers import derive_seed


def _spec(**overrides):
    spec = {
        "parameter": "M",
        "values": [4.0, 6.0, 8.0, 10.0],
        "series_parameter": "Gamma",
        "series_values": [10.0, 20.0, 30.0],
        "baselines": ["noma"],
        "seed": 3,
        "repetitions": 1,
    }
    spec.update(overrides)
    return spec


def test_antenna_grid_with_power_series(default_scenario):
    points = SweepService.build_points(_spec(), default_scenario)
    assert len(points) == 12
    assert {(p["series_value"], p["value"]) for p in points} == {
        (g, m) for g in (10.0, 20.0, 30.0) for m in (4, 6, 8, 10)
    }
    first = points[0]
    assert first["scenario"]["M"] == 4 and isinstance(first["scenario"]["M"], int)
    assert first["scenario"]["Gamma"] == 10.0
    assert first["scenario"]["u_b"] == list(default_scenario.u_b)


def test_noma_oma_pairs(default_scenario):
    spec = _spec(
        parameter="S_b", values=[1e6, 2e6], series_parameter=None, series_values=[],
        baselines=["noma", "oma"], repetitions=2,
    )
    points = SweepService.build_points(spec, default_scenario)
    assert len(points) == 8
    assert [p["baseline"] for p in points[:4]] == ["noma", "noma", "oma", "oma"]
    assert {p["seed"] for p in points} == {derive_seed(3, 0), derive_seed(3, 1)}
    assert all(p["scenario"]["seed"] == p["seed"] for p in points)


def _fake_row(point):
    row = {key: point[key] for key in ("parameter", "value", "series_parameter", "series_value",
                                       "baseline", "repetition", "seed")}
    row.update(status="converged", binding=None, iterations=2, total_aoi=float(point["value"]),
               sum_rate_b=1.0, sum_rate_c=2.0, mean_xi_star=0.95, serving_slots=4)
    return row


def test_run_sweep_writes_files(default_scenario, monkeypatch, tmp_path):
    monkeypatch.setattr(SweepService, "run_point", staticmethod(_fake_row))
    rows = SweepService.run_sweep(_spec(series_parameter=None, series_values=[]), default_scenario, tmp_path,
                                  jobs=1, executor="local")
    assert [row["value"] for row in rows] == [4, 6, 8, 10]
    aggregate = ReportService.read_csv(tmp_path / "aggregate.csv")
    assert [row["total_aoi"] for row in aggregate] == ["4.0", "6.0", "8.0", "10.0"]
    assert (tmp_path / "column_map.csv").exists()


def test_unknown_executor(default_scenario, tmp_path):
    with pytest.raises(ValueError, match="executor"):
        SweepService.run_sweep(_spec(), default_scenario, tmp_path, executor="slurm")


def test_infeasible_point_is_recorded(small_scenario):
    spec = _spec(parameter="S_b", values=[80e6], series_parameter=None, series_values=[], baselines=["oma"])
    (point,) = SweepService.build_points(spec, small_scenario)
    row = SweepService.run_point(point)
    assert row["status"] == "infeasible"
    assert row["binding"] == "bob_request_window"

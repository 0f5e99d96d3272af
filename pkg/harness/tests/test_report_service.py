import os

from harness.models import CheckOutcome
from harness.services.report_service import (
    RESULT_COLUMNS,
    SUMMARY_COLUMNS,
    SWEEP_COLUMNS,
    ReportService,
)


def _lines(path):
    with open(path, encoding="utf-8") as handle:
        return handle.read().splitlines()


def test_schema_comment_and_header(tmp_path, settings):
    settings.CSV_SCHEMA_VERSION = "7"
    path = ReportService.write_csv(tmp_path / "x.csv", "demo", ("a", "b"), [{"a": 1, "b": 0.5}])
    assert _lines(path) == ["# schema demo v7", "a,b", "1,0.5"]


def test_cells(tmp_path):
    row = {"a": True, "b": None, "c": (1, 2), "d": 0.1, "e": "x"}
    path = ReportService.write_csv(tmp_path / "x.csv", "demo", tuple(row), [row])
    assert _lines(path)[-1] == "1,,1;2,0.1,x"


def test_read_back(tmp_path):
    path = ReportService.write_csv(tmp_path / "x.csv", "demo", ("a",), [{"a": 2.5}])
    assert ReportService.read_csv(path) == [{"a": "2.5"}]


def test_run_files(init_result, tmp_path):
    paths = ReportService.write_run(init_result, tmp_path)
    assert sorted(paths) == ["iters.csv", "result.csv", "scenario.json", "summary.csv"]

    result_lines = _lines(paths["result.csv"])
    assert result_lines[1] == ",".join(RESULT_COLUMNS)
    assert len(result_lines) == 2 + init_result.scenario.N
    assert _lines(paths["summary.csv"])[1] == ",".join(SUMMARY_COLUMNS)
    assert len(ReportService.read_csv(paths["iters.csv"])) == 1


def test_run_files_are_byte_stable(init_result, tmp_path):
    first = ReportService.write_run(init_result, tmp_path / "first")
    second = ReportService.write_run(init_result, tmp_path / "second")
    for name in ("result.csv", "iters.csv", "summary.csv", "scenario.json"):
        with open(first[name], "rb") as a, open(second[name], "rb") as b:
            assert a.read() == b.read()


def test_summary_row(init_result):
    row = ReportService.summary_row(init_result)
    assert row["total_aoi"] == init_result.objective
    assert row["iterations"] == 0
    assert row["mean_xi_star"] >= 1.0 - init_result.scenario.epsilon
    assert row["serving_slots"] == len(init_result.serving)
    assert row["serving_slots"] >= 1


def test_aggregate_skips_failed_points():
    base = {"parameter": "S_b", "series_parameter": None, "series_value": None, "baseline": "noma"}
    rows = [
        dict(base, value=1e6, status="converged", total_aoi=10.0, sum_rate_b=1.0, sum_rate_c=2.0, mean_xi_star=0.95,
             serving_slots=3),
        dict(base, value=1e6, status="converged", total_aoi=12.0, sum_rate_b=3.0, sum_rate_c=2.0, mean_xi_star=0.93,
             serving_slots=5),
        dict(base, value=2e6, status="infeasible"),
    ]
    first, second = ReportService.aggregate_rows(rows)
    assert (first["runs"], first["solved"], first["total_aoi"], first["sum_rate_b"]) == (2, 2, 11.0, 2.0)
    assert first["serving_slots"] == 4.0
    assert (second["runs"], second["solved"], second["total_aoi"]) == (1, 0, None)


def test_sweep_files(tmp_path):
    row = {column: None for column in SWEEP_COLUMNS}
    row.update(parameter="M", value=4, baseline="noma", repetition=0, seed=1, status="infeasible", binding="bob_qos")
    paths = ReportService.write_sweep([row], tmp_path)
    assert sorted(paths) == ["aggregate.csv", "column_map.csv", "sweep.csv"]
    assert ReportService.read_csv(paths["sweep.csv"])[0]["binding"] == "bob_qos"
    assert len(ReportService.read_csv(paths["column_map.csv"])) > 0


def test_verification_file(tmp_path):
    path = ReportService.write_verification([CheckOutcome("a", True, "ok"), CheckOutcome("b", False, "bad")], tmp_path)
    assert os.path.basename(path) == "verify.csv"
    assert [row["passed"] for row in ReportService.read_csv(path)] == ["1", "0"]

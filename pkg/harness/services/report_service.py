"""
Service for writing run, sweep and verification results as CSV files.
"""

import csv
import logging
import os

import numpy as np
from django.conf import settings

from scenarios.services.scenario_service import ScenarioService
from utils.helpers import format_float

logger = logging.getLogger(__name__)

RESULT_COLUMNS = (
    "n", "q_x", "q_y", "delta_b", "delta_c", "rate_b", "rate_c",
    "p_b", "p_c", "upsilon", "xi_star", "serving",
)
ITERATION_COLUMNS = (
    "iteration", "objective", "slack", "accepted", "worst", "worst_value",
    "upsilon_mean", "xi_star_mean", "serving", "flagged",
)
SUMMARY_COLUMNS = (
    "baseline", "status", "iterations", "total_aoi", "sum_rate_b", "sum_rate_c", "mean_xi_star", "serving_slots",
)
SWEEP_COLUMNS = (
    "parameter", "value", "series_parameter", "series_value", "baseline", "repetition", "seed",
    "status", "binding", "iterations", "total_aoi", "sum_rate_b", "sum_rate_c", "mean_xi_star",
    "serving_slots",
)
AGGREGATE_COLUMNS = (
    "parameter", "value", "series_parameter", "series_value", "baseline",
    "runs", "solved", "total_aoi", "sum_rate_b", "sum_rate_c", "mean_xi_star", "serving_slots",
)
VERIFY_COLUMNS = ("check", "passed", "detail")
COLUMN_MAP_COLUMNS = ("trend", "file", "x", "series", "y")

COLUMN_MAP = (
    ("total AoI against antennas, one series per power budget", "aggregate.csv", "value", "series_value", "total_aoi"),
    ("per-slot rates along the designed path", "result.csv", "n", "", "rate_b;rate_c"),
    ("covert rate against covertness requirement", "aggregate.csv", "value", "baseline", "sum_rate_b"),
    ("total AoI against covertness requirement", "aggregate.csv", "value", "baseline", "total_aoi"),
    ("total AoI against covert demand, NOMA and OMA", "aggregate.csv", "value", "baseline", "total_aoi"),
    ("aggregate rate against covert demand, NOMA and OMA", "aggregate.csv", "value", "baseline", "sum_rate_b;sum_rate_c"),
    ("per-slot detection error against the guard line", "result.csv", "n", "", "xi_star"),
    ("serving slots against covert demand", "aggregate.csv", "value", "baseline", "serving_slots"),
    ("serving slots against covertness requirement", "aggregate.csv", "value", "baseline", "serving_slots"),
    ("designed, straight-line and random paths", "result.csv", "q_x", "", "q_y"),
    ("total AoI of the path schemes", "summary.csv", "baseline", "", "total_aoi"),
    ("total AoI of the path schemes against covertness requirement", "aggregate.csv", "value", "baseline", "total_aoi"),
)


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (list, tuple)):
        return ";".join(_cell(v) for v in value)
    return str(value)


class ReportService:
    """
    Service for the CSV interface; every file starts with a schema comment.
    """

    @staticmethod
    def write_csv(path, schema, columns, rows):
        """
        Write rows under a ``# schema <name> v<version>`` comment line.

        Args:
            path: Destination file
            schema: Schema name
            columns: Column order
            rows: Iterable of dicts keyed by column

        Returns:
            str: The path written
        """
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(f"# schema {schema} v{settings.CSV_SCHEMA_VERSION}\n")
            writer = csv.DictWriter(handle, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({column: _cell(row.get(column)) for column in columns})
        return str(path)

    @staticmethod
    def read_csv(path):
        """
        Read a file written by ``write_csv``.

        Returns:
            list: Rows as dicts of strings
        """
        with open(path, encoding="utf-8", newline="") as handle:
            lines = [line for line in handle if not line.startswith("#")]
        return list(csv.DictReader(lines))

    @staticmethod
    def result_rows(result):
        """
        Per-slot rows of a finished run.
        """
        rate_b, rate_c = result.rates
        schedule, plan = result.schedule, result.plan
        serving = result.serving.mask(result.scenario.N)
        upsilon, xi_star = result.upsilon, result.xi_star
        return [
            {
                "n": n,
                "q_x": result.trajectory.points[n, 0],
                "q_y": result.trajectory.points[n, 1],
                "delta_b": schedule.delta_b[n],
                "delta_c": schedule.delta_c[n],
                "rate_b": rate_b[n],
                "rate_c": rate_c[n],
                "p_b": plan.p_b[n],
                "p_c": plan.p_c[n],
                "upsilon": upsilon[n],
                "xi_star": xi_star[n],
                "serving": bool(serving[n]),
            }
            for n in range(result.scenario.N)
        ]

    @staticmethod
    def iteration_rows(result):
        return [
            {
                "iteration": record.iteration,
                "objective": record.objective,
                "slack": record.slack,
                "accepted": record.accepted,
                "worst": record.worst,
                "worst_value": record.worst_value,
                "upsilon_mean": record.upsilon_mean,
                "xi_star_mean": record.xi_star_mean,
                "serving": record.serving,
                "flagged": record.flagged,
            }
            for record in result.iterations
        ]

    @staticmethod
    def summary_row(result):
        """
        Totals of a finished run; mean xi* is taken over serving slots (1 without any)
        and ``serving_slots`` counts the slots that carry covert traffic.

        Returns:
            dict: Summary row
        """
        rate_b, rate_c = result.rates
        served = result.serving.mask(result.scenario.N)
        xi_star = float(np.mean(result.xi_star[served])) if served.any() else 1.0
        return {
            "baseline": result.baseline,
            "status": result.status,
            "iterations": len(result.iterations) - 1,
            "total_aoi": result.objective,
            "sum_rate_b": float(np.sum(rate_b)),
            "sum_rate_c": float(np.sum(rate_c)),
            "mean_xi_star": xi_star,
            "serving_slots": len(result.serving),
        }

    @staticmethod
    def write_run(result, out_dir):
        """
        Write ``result.csv``, ``iters.csv``, ``summary.csv`` and the effective ``scenario.json``.

        Args:
            result: OptimizationResult
            out_dir: Output directory (created if missing)

        Returns:
            dict: File name to path
        """
        os.makedirs(out_dir, exist_ok=True)
        paths = {
            "result.csv": ReportService.write_csv(
                os.path.join(out_dir, "result.csv"), "result", RESULT_COLUMNS, ReportService.result_rows(result)
            ),
            "iters.csv": ReportService.write_csv(
                os.path.join(out_dir, "iters.csv"), "iters", ITERATION_COLUMNS, ReportService.iteration_rows(result)
            ),
            "summary.csv": ReportService.write_csv(
                os.path.join(out_dir, "summary.csv"), "summary", SUMMARY_COLUMNS, [ReportService.summary_row(result)]
            ),
        }
        scenario_path = os.path.join(out_dir, "scenario.json")
        ScenarioService.save_scenario(result.scenario, scenario_path)
        paths["scenario.json"] = scenario_path
        logger.info(f"Wrote run results to {out_dir}")
        return paths

    @staticmethod
    def aggregate_rows(rows):
        """
        Mean over repetitions per (series value, value, baseline), in first-seen order.

        Failed points count in ``runs`` but not in the means.
        """
        groups = {}
        for row in rows:
            key = (row["series_value"], row["value"], row["baseline"])
            groups.setdefault(key, []).append(row)

        aggregated = []
        for (series_value, value, baseline), members in groups.items():
            solved = [m for m in members if m["status"] not in ("infeasible", "error")]
            entry = {
                "parameter": members[0]["parameter"],
                "value": value,
                "series_parameter": members[0]["series_parameter"],
                "series_value": series_value,
                "baseline": baseline,
                "runs": len(members),
                "solved": len(solved),
            }
            for column in ("total_aoi", "sum_rate_b", "sum_rate_c", "mean_xi_star", "serving_slots"):
                entry[column] = float(np.mean([m[column] for m in solved])) if solved else None
            aggregated.append(entry)
        return aggregated

    @staticmethod
    def write_sweep(rows, out_dir):
        """
        Write ``sweep.csv``, ``aggregate.csv`` and ``column_map.csv``.

        Returns:
            dict: File name to path
        """
        os.makedirs(out_dir, exist_ok=True)
        column_map = [dict(zip(COLUMN_MAP_COLUMNS, entry)) for entry in COLUMN_MAP]
        paths = {
            "sweep.csv": ReportService.write_csv(os.path.join(out_dir, "sweep.csv"), "sweep", SWEEP_COLUMNS, rows),
            "aggregate.csv": ReportService.write_csv(
                os.path.join(out_dir, "aggregate.csv"), "aggregate", AGGREGATE_COLUMNS,
                ReportService.aggregate_rows(rows),
            ),
            "column_map.csv": ReportService.write_csv(
                os.path.join(out_dir, "column_map.csv"), "column_map", COLUMN_MAP_COLUMNS, column_map
            ),
        }
        logger.info(f"Wrote {len(rows)} sweep rows to {out_dir}")
        return paths

    @staticmethod
    def write_verification(outcomes, out_dir):
        os.makedirs(out_dir, exist_ok=True)
        rows = [{"check": o.name, "passed": o.passed, "detail": o.detail} for o in outcomes]
        return ReportService.write_csv(os.path.join(out_dir, "verify.csv"), "verify", VERIFY_COLUMNS, rows)

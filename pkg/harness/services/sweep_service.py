"""
Service for parameter sweeps over scenarios and baselines.
"""

import logging
from concurrent.futures import ProcessPoolExecutor

from django.conf import settings

from harness.services.report_service import ReportService
from orchestrator.services.baseline_service import BaselineService
from scenarios.services.scenario_service import ScenarioService
from utils.exceptions import CovertAoiError, InfeasibleError
from utils.helpers import derive_seed

logger = logging.getLogger(__name__)

POINT_KEYS = ("parameter", "value", "series_parameter", "series_value", "baseline", "repetition", "seed")


def _coerce(parameter, value):
    return int(value) if parameter == "M" else float(value)


class SweepService:
    """
    Service that expands a sweep into points, runs them and collects summary rows.
    """

    @staticmethod
    def build_points(spec, scenario):
        """
        Expand a validated sweep spec into self-contained points.

        Each repetition gets the seed derive_seed(sweep seed, repetition); user
        positions stay those of the base scenario.

        Args:
            spec: Validated SweepSpecSerializer data
            scenario: Base Scenario

        Returns:
            list: Point dicts (JSON-serializable), in collection order
        """
        base = ScenarioService.dump_scenario(scenario)
        series_parameter = spec.get("series_parameter")
        points = []
        for series_value in spec.get("series_values") or [None]:
            for value in spec["values"]:
                for baseline in spec["baselines"]:
                    for repetition in range(spec["repetitions"]):
                        seed = derive_seed(spec["seed"], repetition)
                        document = dict(base, seed=seed)
                        document[spec["parameter"]] = _coerce(spec["parameter"], value)
                        if series_value is not None:
                            document[series_parameter] = _coerce(series_parameter, series_value)
                        points.append({
                            "parameter": spec["parameter"],
                            "value": _coerce(spec["parameter"], value),
                            "series_parameter": series_parameter,
                            "series_value": None if series_value is None else _coerce(series_parameter, series_value),
                            "baseline": baseline,
                            "repetition": repetition,
                            "seed": seed,
                            "scenario": document,
                        })
        return points

    @staticmethod
    def run_point(point):
        """
        Run one sweep point; failures are recorded in the row, never raised.

        Args:
            point: Point dict from ``build_points``

        Returns:
            dict: Sweep row
        """
        row = {key: point[key] for key in POINT_KEYS}
        label = f"{point['parameter']}={point['value']} ({point['baseline']}, rep {point['repetition']})"
        try:
            scenario = ScenarioService.from_dict(point["scenario"])
            result = BaselineService.run_baseline(scenario, point["baseline"])
        except InfeasibleError as e:
            logger.error(f"Sweep point {label} is infeasible: {str(e)}")
            row.update(status="infeasible", binding=e.binding)
            return row
        except CovertAoiError as e:
            logger.error(f"Sweep point {label} failed: {str(e)}")
            row.update(status="error", binding=None)
            return row

        row.update(ReportService.summary_row(result))
        row["binding"] = None
        logger.info(f"Sweep point {label} done: total AoI {result.objective:.6f} s in {result.wall_time:.1f} s")
        return row

    @staticmethod
    def run_sweep(spec, scenario, out_dir, jobs=None, executor=None):
        """
        Run every point and write the sweep files.

        Args:
            spec: Validated sweep spec
            scenario: Base Scenario
            out_dir: Output directory
            jobs: Local worker processes (defaults to SWEEP_JOBS)
            executor: ``local`` or ``celery`` (defaults to SWEEP_EXECUTOR)

        Returns:
            list: Sweep rows in submission order

        Raises:
            ValueError: If the executor is unknown
        """
        jobs = settings.SWEEP_JOBS if jobs is None else jobs
        executor = executor or settings.SWEEP_EXECUTOR
        points = SweepService.build_points(spec, scenario)
        logger.info(f"Sweeping {spec['parameter']} over {len(points)} points ({executor}, jobs={jobs})")

        if executor == "celery":
            from celery import group

            from orchestrator.tasks import run_sweep_point

            rows = group(run_sweep_point.s(point) for point in points).apply_async().get()
        elif executor == "local":
            if jobs > 1:
                with ProcessPoolExecutor(max_workers=jobs) as pool:
                    rows = list(pool.map(SweepService.run_point, points))
            else:
                rows = [SweepService.run_point(point) for point in points]
        else:
            raise ValueError(f"Unknown sweep executor '{executor}'")

        failed = sum(row["status"] in ("infeasible", "error") for row in rows)
        if failed:
            logger.warning(f"{failed} of {len(rows)} sweep points failed")
        ReportService.write_sweep(rows, out_dir)
        return rows

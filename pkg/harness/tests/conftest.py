import json

import pytest

from orchestrator.models import OptimizationResult
from orchestrator.services.alternating_service import AlternatingService
from orchestrator.services.init_service import InitService


@pytest.fixture
def init_result(small_scenario):
    """
    The initial point wrapped as a finished run, without any optimization.
    """
    init = InitService.init_point(small_scenario)
    point, report = AlternatingService.evaluate(small_scenario, init.trajectory, init.plan, init.serving)
    return OptimizationResult(
        scenario=small_scenario,
        baseline="noma",
        trajectory=point.trajectory,
        plan=point.plan,
        schedule=point.schedule,
        serving=point.serving,
        rates=point.rates,
        iterations=[AlternatingService.record(small_scenario, 0, point, report)],
    )


@pytest.fixture
def write_json(tmp_path):
    def write(name, document):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return write

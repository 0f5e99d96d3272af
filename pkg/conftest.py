"""
Shared pytest fixtures.
"""

import logging

import pytest

from scenarios.services.scenario_service import ScenarioService

APP_LOGGERS = (
    "utils", "scenarios", "channel", "covertness", "surrogate",
    "conic", "subproblems", "orchestrator", "harness",
)


@pytest.fixture
def default_scenario():
    return ScenarioService.default_scenario(seed=0)


@pytest.fixture
def small_scenario():
    """
    A short horizon with a light covert demand; every block solves in well under a second.
    """
    return ScenarioService.from_dict({
        "M": 4,
        "N": 6,
        "V_max": 300.0,
        "q_start": [0.0, 0.0],
        "q_end": [1000.0, 1000.0],
        "u_b": [300.0, 500.0],
        "u_c": [700.0, 400.0],
        "S_b": 20e6,
        "S_c": 5e6,
        "max_outer_iters": 4,
        "tol_obj": 1e-4,
        "seed": 7,
    })


@pytest.fixture
def app_logs(caplog, monkeypatch):
    """
    caplog for the project loggers, which do not propagate to the root logger.
    """
    for name in APP_LOGGERS:
        monkeypatch.setattr(logging.getLogger(name), "propagate", True)
    return caplog

"""
Desk-scale trend checks: small sweeps over three seeds, each trend held by a majority of seeds.
"""

import numpy as np
import pytest

from orchestrator.services.baseline_service import BaselineService
from scenarios.services.scenario_service import ScenarioService
from utils.exceptions import InfeasibleError

pytestmark = pytest.mark.slow

SEEDS = (0, 1, 2)
REL_TOL = 1e-3


def _base(seed):
    # user positions are drawn from the seed
    return ScenarioService.from_dict({
        "M": 4,
        "N": 20,
        "V_max": 120.0,
        "S_b": 20e6,
        "S_c": 2e6,
        "max_outer_iters": 3,
        "tol_obj": 1e-4,
        "seed": seed,
    })


def _run(seed, baseline="noma", **overrides):
    scenario = ScenarioService.with_overrides(_base(seed), **overrides)
    try:
        return BaselineService.run_baseline(scenario, baseline)
    except InfeasibleError:
        return None


def _non_increasing(values):
    return all(b <= a + REL_TOL * abs(a) for a, b in zip(values, values[1:]))


def _assert_majority(held):
    assert sum(held) * 2 > len(held), held


def _covert_rate(result):
    mask = result.serving.mask(result.scenario.N)
    return float(np.mean(result.rates[0][mask]))


def _sum_rate(result):
    return float(np.sum(result.rates[0]) + np.sum(result.rates[1]))


def test_total_aoi_falls_with_antennas():
    held = []
    for seed in SEEDS:
        results = [_run(seed, M=M) for M in (4, 6, 8, 10)]
        held.append(None not in results and _non_increasing([r.objective for r in results]))
    _assert_majority(held)


def test_covert_rate_grows_with_epsilon():
    held = []
    for seed in SEEDS:
        results = [_run(seed, epsilon=epsilon) for epsilon in (0.05, 0.1, 0.2, 0.3)]
        held.append(None not in results and _non_increasing([-_covert_rate(r) for r in results]))
    _assert_majority(held)


def test_carol_outpaces_bob():
    # Carol is served in every slot, Bob only in his serving slots
    held = []
    for seed in SEEDS:
        result = _run(seed)
        held.append(result is not None and float(np.sum(result.rates[1])) > float(np.sum(result.rates[0])))
    _assert_majority(held)


def test_designed_path_beats_fixed_paths():
    held = []
    for seed in SEEDS:
        results = [_run(seed, baseline) for baseline in ("noma", "straight_line", "random_path")]
        held.append(None not in results and _non_increasing([-r.objective for r in results]))
    _assert_majority(held)


def test_noma_rate_beats_oma():
    held = []
    for seed in SEEDS:
        pairs = [(_run(seed, "noma", S_b=S_b), _run(seed, "oma", S_b=S_b)) for S_b in (10e6, 20e6, 30e6)]
        pairs = [(noma, oma) for noma, oma in pairs if noma is not None and oma is not None]
        held.append(bool(pairs) and all(
            _sum_rate(noma) >= _sum_rate(oma) * (1.0 - REL_TOL) for noma, oma in pairs
        ))
    _assert_majority(held)

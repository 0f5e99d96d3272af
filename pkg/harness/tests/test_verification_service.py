import pytest

from covertness.services.detection_service import DetectionService
from harness.services.verification_service import VerificationService


def _raise(seed):
    raise ValueError("bad input")


def test_outcomes_in_order():
    checks = {"good": lambda seed: (True, f"seed {seed}"), "bad": lambda seed: (False, "off")}
    outcomes = VerificationService.run(seed=5, checks=checks)
    assert [(o.name, o.passed, o.detail) for o in outcomes] == [("good", True, "seed 5"), ("bad", False, "off")]


def test_subset():
    checks = {"good": lambda seed: (True, ""), "bad": lambda seed: (False, "")}
    assert [o.name for o in VerificationService.run(["bad"], checks=checks)] == ["bad"]


def test_raising_check_fails():
    (outcome,) = VerificationService.run(checks={"boom": _raise})
    assert not outcome.passed
    assert "ValueError" in outcome.detail


def test_unknown_check():
    with pytest.raises(KeyError):
        VerificationService.run(["nope"])


def test_registry_names():
    assert list(VerificationService.checks()) == [
        "detection_mc", "optimal_threshold", "distance_independence", "upsilon_identity",
        "upsilon_gradient", "surrogate_bounds", "aoi_grid", "sdp_analytic", "beamforming_brute_force",
    ]


@pytest.mark.parametrize("name", ["upsilon_identity", "upsilon_gradient"])
def test_analytic_checks_pass(name):
    (outcome,) = VerificationService.run([name])
    assert outcome.passed, outcome.detail


def test_flipped_gradient_is_caught(monkeypatch):
    gradient = DetectionService.upsilon_grad

    def flipped(p_b, p_c):
        d_b, d_c = gradient(p_b, p_c)
        return -d_b, -d_c

    monkeypatch.setattr(DetectionService, "upsilon_grad", staticmethod(flipped))
    (outcome,) = VerificationService.run(["upsilon_gradient"])
    assert not outcome.passed


@pytest.mark.slow
def test_full_battery_passes():
    outcomes = VerificationService.run(seed=0)
    assert all(o.passed for o in outcomes), [(o.name, o.detail) for o in outcomes if not o.passed]

"""
Domain records for the orchestrator app.
"""

from dataclasses import dataclass, field

import numpy as np
from django.utils.translation import gettext_lazy as _

from covertness.services.detection_service import DetectionService

BASELINE_CHOICES = [
    ("noma", _("Proposed NOMA design")),
    ("oma", _("Orthogonal multiple access")),
    ("straight_line", _("Straight-line path")),
    ("random_path", _("Random path")),
    ("no_covertness", _("NOMA without covertness")),
]
BASELINES = tuple(value for value, label in BASELINE_CHOICES)

STATUS_CONVERGED = "converged"
STATUS_MAX_ITERS = "max_outer_iters"


@dataclass(frozen=True)
class RunOptions:
    """
    Switches that turn the proposed design into one of the baselines.

    Attributes:
        baseline: Baseline key
        covert: Whether the covertness constraint applies (orthogonal slots carry no
            public power to hide under, so OMA runs without it)
        design_trajectory: Whether the trajectory block runs
        oma: Whether slots are exclusive to one user
    """

    baseline: str = "noma"
    covert: bool = True
    design_trajectory: bool = True
    oma: bool = False

    @classmethod
    def for_baseline(cls, baseline):
        if baseline not in BASELINES:
            raise ValueError(f"Unknown baseline '{baseline}'")
        return cls(
            baseline=baseline,
            covert=baseline not in ("no_covertness", "oma"),
            design_trajectory=baseline not in ("straight_line", "random_path"),
            oma=baseline == "oma",
        )


@dataclass(frozen=True, eq=False)
class InitialPoint:
    trajectory: object
    plan: object
    schedule: object
    serving: object
    rates: tuple


@dataclass(frozen=True)
class IterationRecord:
    """
    One row of the iteration log.

    Attributes:
        iteration: Outer iteration (0 is the initial point)
        objective: Total AoI sum_n Delta_b + Delta_c
        slack: Delivered minus requested data over both users, bit/Hz
        accepted: Blocks accepted in this iteration
        worst: Constraint family with the largest residual
        worst_value: Its residual
        upsilon_mean: Mean Upsilon over serving slots
        xi_star_mean: Mean xi* over serving slots
        serving: Number of serving slots
        flagged: Slots whose rank-one recovery was rejected
    """

    iteration: int
    objective: float
    slack: float
    accepted: tuple
    worst: str
    worst_value: float
    upsilon_mean: float
    xi_star_mean: float
    serving: int
    flagged: tuple = ()


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    """
    Final point of a run with its iteration log.

    ``wall_time`` is logged but never written to CSV files.
    """

    scenario: object
    baseline: str
    trajectory: object
    plan: object
    schedule: object
    serving: object
    rates: tuple
    iterations: list = field(default_factory=list)
    status: str = STATUS_MAX_ITERS
    wall_time: float = 0.0

    @property
    def objective(self):
        return self.schedule.objective

    @property
    def upsilon(self):
        """Per-slot Upsilon; 0 where no covert power is sent."""
        return np.atleast_1d(DetectionService.upsilon(self.plan.p_b, self.plan.p_c))

    @property
    def xi_star(self):
        """Per-slot minimum detection error; 1 where no covert power is sent."""
        return np.atleast_1d(DetectionService.xi_star(self.plan.p_b, self.plan.p_c))

    @property
    def objective_trace(self):
        return [record.objective for record in self.iterations]

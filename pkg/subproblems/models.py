"""
Domain records for the subproblems app.
"""

from dataclasses import dataclass, field, replace

import numpy as np

# SIC decoding order: Carol's public signal is decoded first
DECODING_ORDER = {"c": 1, "b": 2}


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    UAV waypoints q[n], one per slot, in meters.
    """

    points: np.ndarray

    @property
    def N(self):
        return self.points.shape[0]

    def moves(self):
        """Horizontal distance flown between consecutive slots."""
        return np.linalg.norm(np.diff(self.points, axis=0), axis=1)


@dataclass(frozen=True, eq=False)
class AoiSchedule:
    """
    Per-slot ages Delta_b[n], Delta_c[n] in seconds.

    ``airtime`` holds the auxiliary max_k Delta_k[n] bound used by the speed constraint.
    """

    delta_b: np.ndarray
    delta_c: np.ndarray
    airtime: np.ndarray

    @property
    def objective(self):
        return float(np.sum(self.delta_b) + np.sum(self.delta_c))


@dataclass(frozen=True, eq=False)
class BeamformerPlan:
    """
    Per-slot beamformers; W_b, W_c are the lifted matrices of an SDR step.

    Attributes:
        w_b, w_c: (N, M) complex beamformers
        W_b, W_c: (N, M, M) Hermitian matrices, or None outside an SDR step
        flagged: Slots whose rank-one recovery was rejected
        throughput: Surrogate objective of the SDR step that produced W_b, W_c
    """

    w_b: np.ndarray
    w_c: np.ndarray
    W_b: np.ndarray = None
    W_c: np.ndarray = None
    flagged: tuple = ()
    throughput: float = None

    @property
    def p_b(self):
        return np.sum(np.abs(self.w_b) ** 2, axis=1)

    @property
    def p_c(self):
        return np.sum(np.abs(self.w_c) ** 2, axis=1)

    def with_beams(self, w_b, w_c, flagged=()):
        return replace(self, w_b=np.asarray(w_b), w_c=np.asarray(w_c), flagged=tuple(flagged))


@dataclass(frozen=True)
class ServingSchedule:
    """
    0-based slots in which Bob is served; sorted, unique.
    """

    slots: tuple = field(default=())

    @classmethod
    def of(cls, slots):
        return cls(tuple(sorted({int(n) for n in slots})))

    def __contains__(self, n):
        return n in self.slots

    def __len__(self):
        return len(self.slots)

    def mask(self, N):
        flags = np.zeros(N, dtype=bool)
        flags[list(self.slots)] = True
        return flags

    def union(self, other):
        return ServingSchedule.of(self.slots + tuple(other.slots))


@dataclass(frozen=True, eq=False)
class RankOneResult:
    """
    Beamformer recovered from a lifted matrix.

    Attributes:
        vector: Complex M-vector
        method: ``zero``, ``eigen`` or ``randomized``
        eigen_ratio: lambda_2 / lambda_1 of the input
    """

    vector: np.ndarray
    method: str
    eigen_ratio: float = 0.0


@dataclass(frozen=True)
class FeasibilityReport:
    """
    Exact-constraint residuals of a candidate point and the worst one.
    """

    residuals: dict
    worst: str
    worst_value: float
    ok: bool

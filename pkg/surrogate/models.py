"""
Domain records for the surrogate app.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class TrajectoryLinearization:
    """
    Expansion point of the trajectory block.

    Attributes:
        points: (N, 2) anchor trajectory q^zeta in meters
        j_b, j_c: Squared horizontal distances to Bob and Carol at the anchor, meters^2
        z_b, z_c: Aligned powers (sum_m |w_k,m|)^2 of the fixed beamformers, watts
        eta_b, eta_c: mu0 / sigma_k^2
        H: UAV altitude, meters
    """

    points: np.ndarray
    j_b: np.ndarray
    j_c: np.ndarray
    z_b: np.ndarray
    z_c: np.ndarray
    eta_b: float
    eta_c: float
    H: float

    @property
    def N(self):
        return self.points.shape[0]

    def gains(self):
        """Dimensionless aligned SNR scales (A_b at Bob, A_bc and A_cc at Carol) over H^2."""
        return (
            self.eta_b * self.z_b / self.H ** 2,
            self.eta_c * self.z_b / self.H ** 2,
            self.eta_c * self.z_c / self.H ** 2,
        )


@dataclass(frozen=True, eq=False)
class RateLinearization:
    """
    Anchors of the SINR-rate surrogate, per unit noise power.

    f_k = sigma_k^2 / |h_k^H w_k|^2 and g_k is the interference-plus-noise
    over noise seen by user k after SIC (Bob sees noise only, so g_b = 1).
    """

    f_b: np.ndarray
    f_c: np.ndarray
    g_b: np.ndarray
    g_c: np.ndarray


@dataclass(frozen=True)
class CovertnessHalfspace:
    """
    Tangent of the covertness function at (anchor_b, anchor_c), bounded by epsilon.
    """

    value: float
    grad_b: float
    grad_c: float
    anchor_b: float
    anchor_c: float
    epsilon: float

    def lhs(self, p_b, p_c):
        """Linearized covertness function; accepts floats or affine cvxpy expressions."""
        return self.value + self.grad_b * (p_b - self.anchor_b) + self.grad_c * (p_c - self.anchor_c)

    def holds(self, p_b, p_c, tol=0.0):
        """Whether the linearized constraint holds at (p_b, p_c) up to tol."""
        return self.lhs(p_b, p_c) <= self.epsilon + tol


@dataclass(frozen=True)
class TangentProbe:
    """
    Outcome of the empirical check that the covertness tangent over-estimates the function.
    """

    anchors: int
    samples: int
    violations: int
    worst_gap: float

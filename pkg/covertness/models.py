"""
Domain records for the covertness app.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EveModel:
    """
    Received-power law at Eve for one slot.

    varpi_k = mu0 * {B_sum, C_sum} / d_e^2, where B_sum and C_sum are the
    per-antenna beamformer variance sums (equal to the transmit powers).
    """

    varpi_b: float
    varpi_c: float
    sigma_e2: float
    d_e: float = 1.0
    B_sum: float = 0.0
    C_sum: float = 0.0
    mu0: float = 1.0

    @classmethod
    def from_powers(cls, B_sum, C_sum, mu0, d_e, sigma_e2):
        """
        Build the model from transmit powers and Eve's distance.
        """
        scale = mu0 / d_e ** 2
        return cls(
            varpi_b=scale * B_sum,
            varpi_c=scale * C_sum,
            sigma_e2=sigma_e2,
            d_e=d_e,
            B_sum=B_sum,
            C_sum=C_sum,
            mu0=mu0,
        )

    @classmethod
    def from_varpi(cls, varpi_b, varpi_c, sigma_e2):
        """
        Build the model directly from received-power scales (mu0 = d_e = 1).
        """
        return cls(varpi_b, varpi_c, sigma_e2, 1.0, varpi_b, varpi_c, 1.0)


@dataclass(frozen=True)
class DetectionReport:
    """
    Eve's best radiometer operating point for one slot.
    """

    tau_star: float
    xi_star: float
    p_fa: float
    p_md: float
    varpi_b: float = 0.0
    varpi_c: float = 0.0
    upsilon: float = 0.0


@dataclass(frozen=True, eq=False)
class DetectionCurve:
    """
    False-alarm, miss and total error probabilities over a threshold grid.
    """

    taus: np.ndarray
    p_fa: np.ndarray
    p_md: np.ndarray
    xi: np.ndarray


@dataclass(frozen=True)
class OracleEstimate:
    """
    Monte-Carlo estimate of Eve's error probabilities with standard errors.
    """

    p_fa: float
    p_md: float
    se_fa: float
    se_md: float
    trials: int
    G: int
    method: str

"""
Service for the Monte-Carlo detection oracle.
"""

import logging

import numpy as np
from django.conf import settings

from covertness.models import OracleEstimate
from utils.helpers import make_rng

logger = logging.getLogger(__name__)


def _complex_normal(rng, variance, size):
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


class DetectionOracleService:
    """
    Service that samples Eve's radiometer to validate the closed forms.
    """

    @staticmethod
    def mc_detection_oracle(eve, tau, trials, G, seed, M=4):
        """
        Estimate P_FA and P_MD by sampling beamformers, symbols and noise.

        Each trial draws per-antenna weights w_k,m ~ CN(0, {B,C}_sum/M) and
        forms s_k = sum_m h_e,m w_k,m with |h_e,m|^2 = mu0/d_e^2. The radiometer
        average T_e over G channel uses is sampled literally while
        trials * G stays under ORACLE_LITERAL_SAMPLE_LIMIT, otherwise from its
        exact conditional law (alpha + sigma_e^2) * Gamma(G, 1)/G.

        Args:
            eve: EveModel
            tau: Threshold in watts
            trials (int): Number of trials per hypothesis (>= 1000)
            G (int): Channel uses averaged by the radiometer (>= 1)
            seed (int): Generator seed
            M (int): Antennas used to split the beamformer variance

        Returns:
            OracleEstimate: Empirical probabilities with standard errors

        Raises:
            ValueError: If trials or G are out of range
        """
        if trials < 1000 or G < 1:
            raise ValueError(f"oracle needs trials >= 1000 and G >= 1, got {trials}, {G}")

        rng = make_rng(seed)
        gain = np.sqrt(eve.mu0) / eve.d_e
        w_b = _complex_normal(rng, eve.B_sum / M, (trials, M))
        w_c = _complex_normal(rng, eve.C_sum / M, (trials, M))
        alpha_b = np.abs(gain * w_b.sum(axis=1)) ** 2
        alpha_c = np.abs(gain * w_c.sum(axis=1)) ** 2

        literal = trials * G <= settings.ORACLE_LITERAL_SAMPLE_LIMIT
        if literal:
            def radiometer(powers):
                received = np.zeros((trials, G), dtype=complex)
                for alpha in powers:
                    received += np.sqrt(alpha)[:, None] * _complex_normal(rng, 1.0, (trials, G))
                received += _complex_normal(rng, eve.sigma_e2, (trials, G))
                return np.mean(np.abs(received) ** 2, axis=1)
        else:
            def radiometer(powers):
                level = sum(powers) + eve.sigma_e2
                return level * rng.gamma(G, 1.0, size=trials) / G

        t_null = radiometer([alpha_c])
        t_alt = radiometer([alpha_c, alpha_b])

        p_fa = float(np.mean(t_null > tau))
        p_md = float(np.mean(t_alt <= tau))
        estimate = OracleEstimate(
            p_fa=p_fa,
            p_md=p_md,
            se_fa=float(np.sqrt(p_fa * (1.0 - p_fa) / trials)),
            se_md=float(np.sqrt(p_md * (1.0 - p_md) / trials)),
            trials=trials,
            G=G,
            method="literal" if literal else "gamma",
        )
        logger.debug(f"Oracle at tau={tau:.6g}: P_FA={p_fa:.5f}, P_MD={p_md:.5f} ({estimate.method})")
        return estimate

    @staticmethod
    def within(estimate, p_fa, p_md, sigmas=3.0, floor=None):
        """
        Check closed-form values against an estimate within ``sigmas`` standard errors.

        Args:
            estimate: OracleEstimate
            p_fa: Closed-form false-alarm probability
            p_md: Closed-form miss probability
            sigmas: Allowed number of standard errors
            floor: Minimum absolute tolerance (defaults to 1/trials)

        Returns:
            bool: True when both probabilities agree
        """
        floor = 1.0 / estimate.trials if floor is None else floor
        fa_ok = abs(estimate.p_fa - p_fa) <= max(sigmas * estimate.se_fa, floor)
        md_ok = abs(estimate.p_md - p_md) <= max(sigmas * estimate.se_md, floor)
        return fa_ok and md_ok

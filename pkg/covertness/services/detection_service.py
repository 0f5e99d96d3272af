"""
Service for the closed-form detection analytics at Eve.

Eve runs a radiometer on the average received power. Under H0 only the
public signal is present and the statistic is sigma_e^2 + varpi_c * Exp(1);
under H1 the covert signal adds an independent varpi_b * Exp(1) term.
"""

import functools
import logging

import numpy as np
from scipy.optimize import brentq

from covertness.models import DetectionCurve, DetectionReport, EveModel
from channel.services.channel_service import ChannelService

logger = logging.getLogger(__name__)

# Ratios this close to 1 are evaluated through series expansions
DIAGONAL_BAND = 1e-6


def _ratio_log(r):
    """r ln r / (r - 1), continuous at r = 1 and r = 0."""
    r = np.asarray(r, dtype=float)
    x = r - 1.0
    near = np.abs(x) <= DIAGONAL_BAND * np.maximum(r, 1.0)
    safe_x = np.where(near | (r == 0.0), 1.0, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = r * np.log1p(safe_x) / safe_x
    series = 1.0 + x / 2.0 - x ** 2 / 6.0 + x ** 3 / 12.0
    out = np.where(near, series, direct)
    return np.where(r == 0.0, 0.0, out)


def _ratio_log_prime(r):
    """Derivative of r ln r / (r - 1): (r - 1 - ln r) / (r - 1)^2."""
    r = np.asarray(r, dtype=float)
    x = r - 1.0
    near = np.abs(x) <= DIAGONAL_BAND * np.maximum(r, 1.0)
    safe_x = np.where(near, 1.0, x)
    direct = (safe_x - np.log1p(safe_x)) / safe_x ** 2
    series = 0.5 - x / 3.0 + x ** 2 / 4.0
    return np.where(near, series, direct)


def _scalar(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


class DetectionService:
    """
    Service for P_FA, P_MD, the optimal threshold and the covertness function.
    """

    @staticmethod
    def p_fa(tau, eve):
        """
        False-alarm probability at threshold ``tau``.

        Args:
            tau: Threshold in watts (scalar or array)
            eve: EveModel

        Returns:
            float or numpy.ndarray: exp((sigma_e^2 - tau)/varpi_c), 1 for tau <= sigma_e^2
        """
        t = np.asarray(tau, dtype=float) - eve.sigma_e2
        if eve.varpi_c > 0.0:
            tail = np.exp(-np.maximum(t, 0.0) / eve.varpi_c)
        else:
            tail = np.zeros_like(t)
        return _scalar(np.where(t > 0.0, tail, 1.0))

    @staticmethod
    def p_md(tau, eve):
        """
        Missed-detection probability at threshold ``tau``.

        Args:
            tau: Threshold in watts (scalar or array)
            eve: EveModel

        Returns:
            float or numpy.ndarray: Hypoexponential CDF at tau - sigma_e^2, 0 for tau <= sigma_e^2
        """
        t = np.maximum(np.asarray(tau, dtype=float) - eve.sigma_e2, 0.0)
        vb, vc = eve.varpi_b, eve.varpi_c
        scale = max(vb, vc)

        if scale == 0.0:
            cdf = np.ones_like(t)
        elif abs(vc - vb) <= DIAGONAL_BAND * scale:
            mean = 0.5 * (vb + vc)
            cdf = 1.0 - np.exp(-t / mean) * (1.0 + t / mean)
        else:
            def decay(v):
                return v * np.exp(-t / v) if v > 0.0 else np.zeros_like(t)

            cdf = (decay(vb) - decay(vc)) / (vc - vb) + 1.0

        return _scalar(np.where(np.asarray(tau, dtype=float) > eve.sigma_e2, np.clip(cdf, 0.0, 1.0), 0.0))

    @staticmethod
    def xi(tau, eve):
        """
        Total detection error P_FA + P_MD (1 for tau <= sigma_e^2).
        """
        return _scalar(np.asarray(DetectionService.p_fa(tau, eve)) + np.asarray(DetectionService.p_md(tau, eve)))

    @staticmethod
    def xi_derivative_tau(tau, eve):
        """
        d xi / d tau for tau > sigma_e^2; zero at the optimal threshold.
        """
        t = np.maximum(np.asarray(tau, dtype=float) - eve.sigma_e2, 0.0)
        vb, vc = eve.varpi_b, eve.varpi_c
        d_fa = -np.exp(-t / vc) / vc
        if abs(vc - vb) <= DIAGONAL_BAND * max(vb, vc):
            mean = 0.5 * (vb + vc)
            d_md = t * np.exp(-t / mean) / mean ** 2
        else:
            d_md = (np.exp(-t / vc) - (np.exp(-t / vb) if vb > 0.0 else 0.0)) / (vc - vb)
        return _scalar(d_fa + d_md)

    @staticmethod
    def xi_derivative_distance(tau, eve):
        """
        d xi / d d_e at a fixed threshold, through varpi_k proportional to d_e^-2.

        At tau = tau*(d_e) this vanishes, since xi* does not depend on d_e.

        Args:
            tau: Threshold in watts (> sigma_e^2)
            eve: EveModel with a positive d_e

        Returns:
            float: Derivative with respect to Eve's distance
        """
        t = max(float(tau) - eve.sigma_e2, 0.0)
        vb, vc = eve.varpi_b, eve.varpi_c
        if abs(vc - vb) <= DIAGONAL_BAND * max(vb, vc):
            mean = 0.5 * (vb + vc)
            d_mean = -(t ** 2) * np.exp(-t / mean) / mean ** 3
            d_fa = t / mean ** 2 * np.exp(-t / mean)
            return float((d_mean + d_fa) * (-2.0 * mean / eve.d_e))

        e_b, e_c = np.exp(-t / vb), np.exp(-t / vc)
        gap = vc - vb
        numer = vb * e_b - vc * e_c
        d_vb = e_b * (1.0 + t / vb) / gap + numer / gap ** 2
        d_vc = -e_c * (1.0 + t / vc) / gap - numer / gap ** 2 + t / vc ** 2 * e_c
        return float(-2.0 / eve.d_e * (d_vb * vb + d_vc * vc))

    @staticmethod
    def optimal_tau(eve):
        """
        Threshold minimizing xi: sigma_e^2 + varpi_b varpi_c ln(varpi_c/varpi_b)/(varpi_c - varpi_b).

        Args:
            eve: EveModel

        Returns:
            float: tau* in watts (sigma_e^2 + varpi on the diagonal, sigma_e^2 without covert power)
        """
        if eve.varpi_b <= 0.0:
            return float(eve.sigma_e2)
        return float(eve.sigma_e2 + eve.varpi_b * _ratio_log(eve.varpi_c / eve.varpi_b))

    @staticmethod
    def upsilon(p_b, p_c):
        """
        Covertness function 1 - xi*, a function of the power ratio only.

        Args:
            p_b: Covert power (>= 0)
            p_c: Public power

        Returns:
            float or numpy.ndarray: (p_c/p_b)^(-(p_c/p_b)/(p_c/p_b - 1)), 0 without covert power
        """
        p_b = np.asarray(p_b, dtype=float)
        p_c = np.asarray(p_c, dtype=float)
        p_b, p_c = np.broadcast_arrays(p_b, p_c)
        active = p_b > 0.0
        ratio = np.where(active, np.maximum(p_c, 0.0) / np.where(active, p_b, 1.0), 1.0)
        value = np.exp(-_ratio_log(ratio))
        return _scalar(np.where(active, value, 0.0))

    @staticmethod
    def xi_star(B_sum, C_sum):
        """
        Minimum detection error rate over threshold and Eve position.

        Evaluated as 1 + B/(C - B) * (r^(C/(B-C)) - r^(B/(B-C))) with r = C/B.
        The difference of powers is factored through expm1 so it keeps its
        accuracy near B = C, where the value tends to 1 - 1/e.

        Args:
            B_sum: Covert power
            C_sum: Public power

        Returns:
            float or numpy.ndarray: xi*, independent of distance, mu0 and sigma_e^2
        """
        B_sum = np.asarray(B_sum, dtype=float)
        C_sum = np.asarray(C_sum, dtype=float)
        B_sum, C_sum = np.broadcast_arrays(B_sum, C_sum)
        active = (B_sum > 0.0) & (C_sum > 0.0)
        r = np.where(active, C_sum / np.where(active, B_sum, 1.0), 2.0)
        x = r - 1.0
        near = np.abs(x) <= DIAGONAL_BAND * np.maximum(r, 1.0)
        safe_x = np.where(near, 1.0, x)
        log_r = np.log1p(x)
        # ln(r)/(r - 1), so r^(-1/(r-1)) = exp(-exponent)
        exponent = np.where(near, 1.0 - x / 2.0 + x ** 2 / 3.0, log_r / safe_x)
        # (r^(-1) - 1)/(r - 1)
        bracket = np.where(near, -1.0 / (1.0 + x), np.expm1(-log_r) / safe_x)
        value = 1.0 + np.exp(-exponent) * bracket
        # no covert power: undetectable; no public power: always detected
        value = np.where(active, value, np.where(B_sum > 0.0, 0.0, 1.0))
        return _scalar(value)

    @staticmethod
    def upsilon_grad(p_b, p_c):
        """
        Gradient of the covertness function.

        Args:
            p_b: Covert power (> 0)
            p_c: Public power (> 0)

        Returns:
            tuple: (dUpsilon/dp_b >= 0, dUpsilon/dp_c <= 0), homogeneous of degree -1
        """
        p_b = np.asarray(p_b, dtype=float)
        p_c = np.asarray(p_c, dtype=float)
        ratio = p_c / p_b
        value = np.exp(-_ratio_log(ratio))
        slope = value * _ratio_log_prime(ratio) / p_b
        return _scalar(slope * ratio), _scalar(-slope)

    @staticmethod
    @functools.lru_cache(maxsize=256)
    def covert_ratio(epsilon):
        """
        Smallest public/covert power ratio kappa with Upsilon(1, kappa) <= epsilon.

        Upsilon is non-increasing in the ratio, so the exact covert set is the
        cone p_c >= kappa * p_b.

        Args:
            epsilon (float): Covertness requirement in (0, 1)

        Returns:
            float: kappa
        """
        lo, hi = 1e-12, 1e12

        def excess(r):
            return float(DetectionService.upsilon(1.0, r)) - epsilon

        if excess(lo) <= 0.0:
            return 0.0
        if excess(hi) > 0.0:
            logger.warning(f"Covertness requirement {epsilon} beyond ratio {hi:.0e}")
            return hi
        return float(brentq(excess, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500))

    @staticmethod
    def eve_for_powers(p_b, p_c, scenario, d_e=None):
        """
        Eve model at her worst-case placement d_e = d_min unless given.
        """
        d_e = scenario.d_min if d_e is None else d_e
        return EveModel.from_powers(p_b, p_c, scenario.mu0, d_e, scenario.sigma_e2)

    @staticmethod
    def eve_distance(q, l, scenario):
        """
        Alice-Eve distance for a UAV position and Eve's horizontal position.
        """
        return ChannelService.distance(q, l, scenario.H - scenario.h)

    @staticmethod
    def detection_report(eve):
        """
        Build the detection report at the optimal threshold.

        Args:
            eve: EveModel

        Returns:
            DetectionReport: tau*, xi(tau*), P_FA and P_MD at tau*, varpi values and Upsilon
        """
        tau = DetectionService.optimal_tau(eve)
        p_fa = float(DetectionService.p_fa(tau, eve))
        p_md = float(DetectionService.p_md(tau, eve))
        return DetectionReport(
            tau_star=tau,
            xi_star=p_fa + p_md,
            p_fa=p_fa,
            p_md=p_md,
            varpi_b=eve.varpi_b,
            varpi_c=eve.varpi_c,
            upsilon=float(DetectionService.upsilon(eve.varpi_b, eve.varpi_c)),
        )

    @staticmethod
    def detection_curve(eve, taus):
        """
        Evaluate P_FA, P_MD and xi over a threshold grid.
        """
        taus = np.asarray(taus, dtype=float)
        p_fa = np.asarray(DetectionService.p_fa(taus, eve), dtype=float)
        p_md = np.asarray(DetectionService.p_md(taus, eve), dtype=float)
        return DetectionCurve(taus=taus, p_fa=p_fa, p_md=p_md, xi=p_fa + p_md)

    @staticmethod
    def threshold_grid(eve, points=100000):
        """
        Grid over (sigma_e^2, sigma_e^2 + 20 max(varpi)) used by minimality checks.
        """
        span = 20.0 * max(eve.varpi_b, eve.varpi_c)
        return eve.sigma_e2 + span * np.arange(1, points + 1) / points

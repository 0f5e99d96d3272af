"""
Service for recovering beamformers from lifted SDR solutions.
"""

import logging

import numpy as np
from django.conf import settings

from subproblems.models import RankOneResult
from utils.helpers import make_rng

logger = logging.getLogger(__name__)


class RankOneService:
    """
    Service for principal-eigenvector and Gaussian-randomization recovery.
    """

    @staticmethod
    def extract_rank_one(W, score=None, draws=None, ratio=None, seed=0):
        """
        Recover a vector w with w w^H close to a Hermitian PSD matrix.

        A numerically rank-one W gives its principal eigenvector scaled to
        sqrt(lambda_1). Otherwise candidates are drawn from CN(0, W),
        rescaled to power Tr(W), and the best-scoring one is kept.

        Args:
            W: (M, M) Hermitian PSD matrix
            score: Callable ranking candidate vectors (higher is better);
                defaults to the captured energy w^H W w
            draws: Number of randomization draws (defaults to OPTIMIZER_RANDOMIZATION_DRAWS)
            ratio: Largest lambda_2/lambda_1 treated as rank one (defaults to OPTIMIZER_RANK_ONE_RATIO)
            seed: Seed of the randomization

        Returns:
            RankOneResult: Vector, recovery method and eigenvalue ratio
        """
        draws = settings.OPTIMIZER_RANDOMIZATION_DRAWS if draws is None else draws
        ratio = settings.OPTIMIZER_RANK_ONE_RATIO if ratio is None else ratio
        W = np.asarray(W, dtype=complex)
        W = 0.5 * (W + W.conj().T)
        M = W.shape[0]

        eigenvalues, eigenvectors = np.linalg.eigh(W)
        eigenvalues = np.maximum(eigenvalues, 0.0)
        top = eigenvalues[-1]
        if top <= 0.0:
            return RankOneResult(vector=np.zeros(M, dtype=complex), method="zero")

        second = eigenvalues[-2] if M > 1 else 0.0
        eigen_ratio = float(second / top)
        if eigen_ratio <= ratio:
            return RankOneResult(
                vector=np.sqrt(top) * eigenvectors[:, -1], method="eigen", eigen_ratio=eigen_ratio
            )

        power = float(np.sum(eigenvalues))
        rng = make_rng(seed)
        z = (rng.standard_normal((draws, M)) + 1j * rng.standard_normal((draws, M))) / np.sqrt(2.0)
        candidates = (z * np.sqrt(eigenvalues)) @ eigenvectors.T
        candidates *= np.sqrt(power) / np.linalg.norm(candidates, axis=1, keepdims=True)

        if score is None:
            scores = np.real(np.einsum("di,ij,dj->d", candidates.conj(), W, candidates))
        else:
            scores = np.array([score(candidate) for candidate in candidates])
        best = int(np.argmax(scores))
        logger.debug(f"Randomized recovery: ratio {eigen_ratio:.3e}, best of {draws} draws scores {scores[best]:.6g}")
        return RankOneResult(vector=candidates[best], method="randomized", eigen_ratio=eigen_ratio)

    @staticmethod
    def induced_gap(w, W, channels):
        """
        Largest relative mismatch between |h^H w|^2 and h^H W h over the given channels.

        Quantities below 1e-12 of the largest one are compared in absolute terms.

        Returns:
            float: Relative gap (0 for identical quadratic forms)
        """
        w = np.asarray(w, dtype=complex)
        lifted = np.array([np.real(np.vdot(h, W @ h)) for h in channels])
        recovered = np.array([abs(np.vdot(h, w)) ** 2 for h in channels])
        floor = max(float(np.max(np.abs(lifted), initial=0.0)) * 1e-12, np.finfo(float).tiny)
        return float(np.max(np.abs(recovered - lifted) / np.maximum(np.abs(lifted), floor), initial=0.0))

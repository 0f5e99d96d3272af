"""
Domain records for the scenarios app.
"""

from dataclasses import dataclass, field

import numpy as np

BLOCKS = ("aoi", "trajectory", "beamforming")

# Keys that may be given in dB in scenario files
DB_FIELDS = ("mu0", "sigma_b2", "sigma_c2", "sigma_e2", "Gamma", "P_max")


@dataclass(frozen=True)
class Scenario:
    """
    Immutable record of every physical and algorithmic parameter of a run.

    All quantities are linear-scale SI: seconds, meters, watts, bits, Hz.
    Slot indices inside the optimizer are 0-based; ``bob_request_window``
    keeps the 1-based inclusive form used in scenario files.
    """

    M: int
    N: int
    slot_len: float
    H: float
    h: float
    d_min: float
    V_max: float
    Gamma: float
    P_max: float
    epsilon: float
    mu0: float
    sigma_b2: float
    sigma_c2: float
    sigma_e2: float
    B_hz: float
    S_b: float
    S_c: tuple
    u_b: tuple
    u_c: tuple
    q_start: tuple
    q_end: tuple
    spacing_ratio: float
    bob_request_window: tuple
    tol_feas: float
    tol_obj: float
    max_outer_iters: int
    mc_trials: int
    mc_G: int
    seed: int = 0
    block_order: tuple = field(default=BLOCKS)

    @property
    def delta(self):
        """Slot length δ in seconds."""
        return self.slot_len

    @property
    def window_slots(self):
        """0-based slot indices in which Bob may be served."""
        lo, hi = self.bob_request_window
        return tuple(range(lo - 1, hi))

    @property
    def need_c(self):
        """Per-slot Carol demand S_c[n]/B in bit/Hz."""
        return np.asarray(self.S_c, dtype=float) / self.B_hz

    @property
    def need_b(self):
        """Total Bob demand S_b/B in bit/Hz."""
        return self.S_b / self.B_hz

    @property
    def eta_b(self):
        return self.mu0 / self.sigma_b2

    @property
    def eta_c(self):
        return self.mu0 / self.sigma_c2

    @property
    def move_budget(self):
        """Longest horizontal move in one slot, meters."""
        return self.V_max * self.slot_len

    def user(self, key):
        """Ground position of user ``"b"`` or ``"c"`` as an array."""
        return np.asarray(self.u_b if key == "b" else self.u_c, dtype=float)

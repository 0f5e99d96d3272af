"""
Domain records for the channel app.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Position2D:
    """
    Horizontal position in meters (UAV waypoint, ground user or Eve).
    """

    x: float
    y: float

    @classmethod
    def of(cls, value):
        """Coerce a Position2D, pair or array into a Position2D."""
        if isinstance(value, Position2D):
            return value
        x, y = np.asarray(value, dtype=float).reshape(2)
        return cls(float(x), float(y))

    def as_array(self):
        """Position as a length-2 float array."""
        return np.array([self.x, self.y], dtype=float)


@dataclass(frozen=True, eq=False)
class SteeringVector:
    """
    Uniform linear array response toward a target; unit-modulus entries.
    """

    entries: np.ndarray

    @property
    def size(self):
        """Number of array elements M."""
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class ChannelVector:
    """
    Free-space LoS channel; every entry has modulus sqrt(mu0)/source_distance.
    """

    entries: np.ndarray
    source_distance: float

    @property
    def size(self):
        """Number of array elements M."""
        return self.entries.shape[0]

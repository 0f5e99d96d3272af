"""
Service for geometry, array responses, LoS channel gains and NOMA rates.
"""

import logging

import numpy as np

from channel.models import ChannelVector, Position2D, SteeringVector
from utils.exceptions import GeometryError

logger = logging.getLogger(__name__)


def _entries(value):
    """Complex entries of a SteeringVector, ChannelVector or plain array."""
    return np.asarray(getattr(value, "entries", value), dtype=complex)


class ChannelService:
    """
    Service for the free-space downlink from the UAV array to Bob, Carol and Eve.
    """

    @staticmethod
    def distance(q, u, dalt):
        """
        Euclidean 3-D distance between a horizontal position pair.

        Args:
            q: Transmitter horizontal position
            u: Target horizontal position
            dalt: Vertical offset in meters (>= 0)

        Returns:
            float: Distance in meters
        """
        offset = Position2D.of(q).as_array() - Position2D.of(u).as_array()
        return float(np.hypot(np.hypot(offset[0], offset[1]), dalt))

    @staticmethod
    def steering_vector(q, target, dalt, M, spacing_ratio):
        """
        ULA response: entry m is exp(-j 2 pi (d/lambda) m sin(theta)), sin(theta) = dalt/d.

        Args:
            q: Transmitter horizontal position
            target: Target horizontal position
            dalt: Vertical offset in meters
            M: Antenna count
            spacing_ratio: Antenna spacing over wavelength

        Returns:
            SteeringVector: Array response

        Raises:
            GeometryError: If the transmitter sits on the target
        """
        d = ChannelService.distance(q, target, dalt)
        if d == 0.0:
            raise GeometryError("steering vector undefined at zero distance")
        sin_theta = dalt / d
        phase = -2.0 * np.pi * spacing_ratio * sin_theta * np.arange(M)
        return SteeringVector(entries=np.exp(1j * phase))

    @staticmethod
    def channel_gain(q, target, dalt, M, spacing_ratio, mu0):
        """
        LoS channel sqrt(mu0)/d times the steering vector.

        Args:
            q: Transmitter horizontal position
            target: Target horizontal position
            dalt: Vertical offset in meters
            M: Antenna count
            spacing_ratio: Antenna spacing over wavelength
            mu0: Channel power at the 1 m reference distance

        Returns:
            ChannelVector: Channel with its source distance
        """
        d = ChannelService.distance(q, target, dalt)
        steering = ChannelService.steering_vector(q, target, dalt, M, spacing_ratio)
        return ChannelVector(entries=np.sqrt(mu0) / d * steering.entries, source_distance=d)

    @staticmethod
    def rate_bob(h_b, w_b, sigma_b2):
        """
        Bob's rate after SIC: log2(1 + |h_b^H w_b|^2 / sigma_b^2).

        Returns:
            float: Rate in bit/s/Hz
        """
        signal = abs(np.vdot(_entries(h_b), _entries(w_b))) ** 2
        return float(np.log2(1.0 + signal / sigma_b2))

    @staticmethod
    def rate_carol(h_c, w_c, w_b, sigma_c2):
        """
        Carol's rate with Bob's signal as interference.

        Returns:
            float: Rate in bit/s/Hz
        """
        h = _entries(h_c)
        signal = abs(np.vdot(h, _entries(w_c))) ** 2
        interference = abs(np.vdot(h, _entries(w_b))) ** 2
        return float(np.log2(1.0 + signal / (interference + sigma_c2)))

    @staticmethod
    def link_channels(scenario, points, key):
        """
        Per-slot channels from the UAV to a ground user.

        Args:
            scenario: Scenario
            points: (N, 2) UAV positions
            key: ``"b"`` or ``"c"``

        Returns:
            numpy.ndarray: (N, M) complex channel matrix, one row per slot
        """
        target = scenario.user(key)
        return np.stack([
            ChannelService.channel_gain(
                q, target, scenario.H, scenario.M, scenario.spacing_ratio, scenario.mu0
            ).entries
            for q in np.asarray(points, dtype=float)
        ])

    @staticmethod
    def slot_rates(scenario, points, w_b, w_c):
        """
        Exact per-slot rates of both users.

        Args:
            scenario: Scenario
            points: (N, 2) UAV positions
            w_b: (N, M) Bob beamformers
            w_c: (N, M) Carol beamformers

        Returns:
            tuple: (R_b, R_c) arrays in bit/s/Hz
        """
        h_b = ChannelService.link_channels(scenario, points, "b")
        h_c = ChannelService.link_channels(scenario, points, "c")
        rate_b = np.array([
            ChannelService.rate_bob(h_b[n], w_b[n], scenario.sigma_b2) for n in range(len(h_b))
        ])
        rate_c = np.array([
            ChannelService.rate_carol(h_c[n], w_c[n], w_b[n], scenario.sigma_c2) for n in range(len(h_c))
        ])
        return rate_b, rate_c

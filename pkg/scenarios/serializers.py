"""
Serializers for the scenarios app.
"""

import math
import numbers

from django.conf import settings
from rest_framework import serializers

from scenarios.models import BLOCKS, DB_FIELDS
from utils.helpers import db_to_linear, make_rng

USER_SQUARE = 1000.0


class PositionField(serializers.ListField):
    """
    A finite 2-D position in meters.
    """

    child = serializers.FloatField()

    def __init__(self, **kwargs):
        kwargs.setdefault("min_length", 2)
        kwargs.setdefault("max_length", 2)
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        values = super().to_internal_value(data)
        if not all(math.isfinite(v) for v in values):
            raise serializers.ValidationError("coordinates must be finite")
        return tuple(float(v) for v in values)


class SlotSeriesField(serializers.Field):
    """
    A per-slot series given either as a scalar (broadcast later) or a list.
    """

    def to_internal_value(self, data):
        if isinstance(data, bool):
            raise serializers.ValidationError("must be a number or a list of numbers")
        if isinstance(data, numbers.Real):
            return float(data)
        if isinstance(data, (list, tuple)) and data:
            if not all(isinstance(v, numbers.Real) and not isinstance(v, bool) for v in data):
                raise serializers.ValidationError("list entries must be numbers")
            return tuple(float(v) for v in data)
        raise serializers.ValidationError("must be a number or a non-empty list of numbers")

    def to_representation(self, value):
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        return float(value)


class ScenarioSerializer(serializers.Serializer):
    """
    Validates a scenario document, applies defaults and converts dB keys.
    """

    M = serializers.IntegerField(min_value=2, default=10)
    N = serializers.IntegerField(min_value=1, default=50)
    slot_len = serializers.FloatField(default=1.0)
    H = serializers.FloatField(default=100.0)
    h = serializers.FloatField(default=50.0)
    d_min = serializers.FloatField(default=20.0)
    V_max = serializers.FloatField(min_value=0.0, default=30.0)
    Gamma = serializers.FloatField(default=10.0)
    P_max = serializers.FloatField(default=30.0)
    epsilon = serializers.FloatField(default=0.1)
    mu0 = serializers.FloatField(default=1e-3)
    sigma_b2 = serializers.FloatField(default=1e-10)
    sigma_c2 = serializers.FloatField(default=1e-10)
    sigma_e2 = serializers.FloatField(default=1e-10)
    B_hz = serializers.FloatField(default=1e6)
    S_b = serializers.FloatField(min_value=0.0, default=45e6)
    S_c = SlotSeriesField(default=5e6)
    u_b = PositionField(required=False)
    u_c = PositionField(required=False)
    q_start = PositionField(default=[0.0, 0.0])
    q_end = PositionField(default=[1000.0, 1000.0])
    spacing_ratio = serializers.FloatField(default=0.5)
    bob_request_window = serializers.ListField(
        child=serializers.IntegerField(), min_length=2, max_length=2, required=False
    )
    tol_feas = serializers.FloatField(default=lambda: settings.OPTIMIZER_TOL_FEAS)
    tol_obj = serializers.FloatField(default=lambda: settings.OPTIMIZER_TOL_OBJ)
    max_outer_iters = serializers.IntegerField(
        min_value=1, default=lambda: settings.OPTIMIZER_MAX_OUTER_ITERS
    )
    mc_trials = serializers.IntegerField(min_value=1000, default=lambda: settings.ORACLE_MC_TRIALS)
    mc_G = serializers.IntegerField(min_value=1, default=lambda: settings.ORACLE_MC_G)
    seed = serializers.IntegerField(min_value=0, default=0)
    block_order = serializers.ListField(
        child=serializers.ChoiceField(choices=BLOCKS), min_length=1, default=list(BLOCKS)
    )

    POSITIVE_FIELDS = (
        "slot_len", "H", "h", "d_min", "Gamma", "P_max", "mu0",
        "sigma_b2", "sigma_c2", "sigma_e2", "B_hz", "spacing_ratio",
        "tol_feas", "tol_obj",
    )

    def to_internal_value(self, data):
        """
        Reject unknown keys and convert ``<field>_db`` keys to linear scale.
        """
        if not isinstance(data, dict):
            raise serializers.ValidationError({"non_field_errors": ["scenario must be an object"]})

        data = dict(data)
        for name in DB_FIELDS:
            key = f"{name}_db"
            if key not in data:
                continue
            if name in data:
                raise serializers.ValidationError({name: [f"give either {name} or {key}, not both"]})
            value = data.pop(key)
            if isinstance(value, bool) or not isinstance(value, numbers.Real):
                raise serializers.ValidationError({key: ["must be a number"]})
            data[name] = db_to_linear(value)

        unknown = sorted(set(data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError({unknown[0]: ["unknown scenario key"]})

        return super().to_internal_value(data)

    def validate(self, attrs):
        """
        Check cross-field invariants, broadcast S_c and draw absent user positions.
        """
        for name in self.POSITIVE_FIELDS:
            if not attrs[name] > 0:
                raise serializers.ValidationError({name: ["must be strictly positive"]})

        if not attrs["h"] < attrs["H"]:
            raise serializers.ValidationError({"h": ["Eve altitude h must be below H"]})
        if not 0.0 < attrs["epsilon"] < 1.0:
            raise serializers.ValidationError({"epsilon": ["must lie strictly between 0 and 1"]})
        if attrs["Gamma"] > attrs["P_max"]:
            raise serializers.ValidationError({"Gamma": ["must not exceed P_max"]})

        n_slots = attrs["N"]
        s_c = attrs["S_c"]
        if isinstance(s_c, float):
            s_c = (s_c,) * n_slots
        if len(s_c) != n_slots:
            raise serializers.ValidationError({"S_c": [f"needs {n_slots} entries, got {len(s_c)}"]})
        if min(s_c) <= 0:
            raise serializers.ValidationError({"S_c": ["packet sizes must be strictly positive"]})
        attrs["S_c"] = tuple(s_c)

        window = tuple(attrs.get("bob_request_window") or (1, n_slots))
        if not 1 <= window[0] <= window[1] <= n_slots:
            raise serializers.ValidationError(
                {"bob_request_window": [f"must satisfy 1 <= lo <= hi <= {n_slots}"]}
            )
        attrs["bob_request_window"] = window

        order = tuple(attrs["block_order"])
        if len(set(order)) != len(order):
            raise serializers.ValidationError({"block_order": ["blocks must not repeat"]})
        attrs["block_order"] = order

        for key in ("q_start", "q_end"):
            attrs[key] = tuple(float(v) for v in attrs[key])

        rng = make_rng(attrs["seed"])
        drawn = rng.uniform(0.0, USER_SQUARE, size=(2, 2))
        attrs.setdefault("u_b", tuple(float(v) for v in drawn[0]))
        attrs.setdefault("u_c", tuple(float(v) for v in drawn[1]))

        # Best case: directly overhead with the whole budget in phase
        gain = attrs["mu0"] * attrs["M"] * attrs["Gamma"] / attrs["H"] ** 2
        best_c = math.log2(1.0 + gain / attrs["sigma_c2"])
        best_b = math.log2(1.0 + gain / attrs["sigma_b2"])
        if max(s_c) / attrs["B_hz"] > attrs["slot_len"] * best_c:
            raise serializers.ValidationError(
                {"S_c": [f"exceeds one slot at the optimistic rate {best_c:.3f} bit/s/Hz"]}
            )
        window_len = window[1] - window[0] + 1
        if attrs["S_b"] / attrs["B_hz"] > attrs["slot_len"] * window_len * best_b:
            raise serializers.ValidationError(
                {"S_b": ["exceeds the request window at the optimistic rate"]}
            )

        return attrs

"""
Service for loading, defaulting, validating and dumping scenarios.
"""

import json
import logging

from scenarios.models import Scenario
from scenarios.serializers import ScenarioSerializer
from utils.exceptions import ScenarioError
from utils.helpers import load_json_file

logger = logging.getLogger(__name__)


class ScenarioService:
    """
    Service for scenario ingestion; the single source of truth for units.
    """

    @staticmethod
    def from_dict(data):
        """
        Build a validated Scenario from a scenario document.

        Args:
            data: Mapping with scenario keys (``_db`` variants accepted)

        Returns:
            Scenario: Fully populated scenario

        Raises:
            ScenarioError: Naming the first offending field
        """
        serializer = ScenarioSerializer(data=data)
        if not serializer.is_valid():
            field, messages = next(iter(serializer.errors.items()))
            message = messages[0] if isinstance(messages, list) else messages
            if isinstance(message, dict):
                message = next(iter(message.values()))[0]
            field = None if field == "non_field_errors" else field
            logger.error(f"Invalid scenario ({field}): {message}")
            raise ScenarioError(str(message), field=field)

        return Scenario(**serializer.validated_data)

    @staticmethod
    def load_scenario(path):
        """
        Load and validate a scenario file.

        Args:
            path: Path to a JSON scenario file

        Returns:
            Scenario: Scenario with defaults applied to absent fields
        """
        document = load_json_file(path)
        scenario = ScenarioService.from_dict(document)
        logger.info(f"Loaded scenario from {path} (M={scenario.M}, N={scenario.N})")
        return scenario

    @staticmethod
    def default_scenario(seed=0):
        """
        Build the default scenario; user positions are drawn from ``seed``.

        Args:
            seed (int): Seed of the user-position generator

        Returns:
            Scenario: Default scenario
        """
        return ScenarioService.from_dict({"seed": seed})

    @staticmethod
    def dump_scenario(scenario):
        """
        Serialize a scenario to a JSON-ready dict of linear-scale values.

        Args:
            scenario: Scenario instance

        Returns:
            dict: Document that re-parses to an equal Scenario
        """
        document = {}
        for name in ScenarioSerializer().fields:
            value = getattr(scenario, name)
            if isinstance(value, tuple):
                value = list(value)
            document[name] = value
        return document

    @staticmethod
    def save_scenario(scenario, path):
        """
        Write a scenario document to disk.

        Args:
            scenario: Scenario instance
            path: Destination file
        """
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(ScenarioService.dump_scenario(scenario), handle, indent=2, sort_keys=True)
            handle.write("\n")

    @staticmethod
    def validate(scenario):
        """
        Re-run every invariant check on an existing scenario.

        Args:
            scenario: Scenario instance

        Returns:
            bool: True when valid

        Raises:
            ScenarioError: If an invariant is violated
        """
        ScenarioService.from_dict(ScenarioService.dump_scenario(scenario))
        return True

    @staticmethod
    def with_overrides(scenario, **changes):
        """
        Derive a new validated scenario with some fields replaced.

        A change of ``N`` re-broadcasts a constant ``S_c`` and resets a
        full-horizon request window.

        Args:
            scenario: Base scenario
            **changes: Field overrides

        Returns:
            Scenario: New scenario
        """
        document = ScenarioService.dump_scenario(scenario)
        if "N" in changes and changes["N"] != scenario.N:
            if "S_c" not in changes:
                if len(set(scenario.S_c)) != 1:
                    raise ScenarioError("cannot resize a non-constant S_c series", field="S_c")
                document["S_c"] = scenario.S_c[0]
            if "bob_request_window" not in changes and tuple(scenario.bob_request_window) == (1, scenario.N):
                document.pop("bob_request_window")
        document.update(changes)
        return ScenarioService.from_dict(document)

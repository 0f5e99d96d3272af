"""
Helper functions for the covert_aoi project.
"""

import json
import logging
import math

import numpy as np

from utils.exceptions import ScenarioError

logger = logging.getLogger(__name__)


def db_to_linear(value_db):
    """
    Convert a power ratio from decibels to linear scale.

    Args:
        value_db (float): Value in dB

    Returns:
        float: Linear value
    """
    return 10.0 ** (float(value_db) / 10.0)


def linear_to_db(value):
    """
    Convert a positive linear power ratio to decibels.

    Args:
        value (float): Linear value

    Returns:
        float: Value in dB
    """
    return 10.0 * math.log10(float(value))


def load_json_file(path):
    """
    Load a JSON document from disk.

    Args:
        path (str): File path

    Returns:
        dict: Parsed document

    Raises:
        ScenarioError: If the file cannot be read or is not a JSON object
    """
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        logger.error(f"Error reading {path}: {str(e)}")
        raise ScenarioError(f"cannot read {path}: {e.strerror}") from e

    if not text.strip():
        return {}

    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        logger.error(f"Error parsing JSON in {path}: {str(e)}")
        raise ScenarioError(f"malformed JSON at line {e.lineno}: {e.msg}") from e

    if not isinstance(document, dict):
        raise ScenarioError("top level must be an object")
    return document


def derive_seed(seed, *keys):
    """
    Derive an independent child seed from a parent seed and integer keys.

    Args:
        seed (int): Parent seed
        *keys (int): Spawn keys, e.g. repetition index

    Returns:
        int: 32-bit child seed
    """
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(sequence.generate_state(1)[0])


def make_rng(seed, *keys):
    """
    Build a numpy Generator from a seed and optional spawn keys.

    Args:
        seed (int): Parent seed
        *keys (int): Spawn keys

    Returns:
        numpy.random.Generator: Seeded generator
    """
    if keys:
        return np.random.default_rng(derive_seed(seed, *keys))
    return np.random.default_rng(int(seed))


def format_float(value):
    """
    Format a number so that equal inputs always give equal text.

    Args:
        value: Number (numpy scalars included)

    Returns:
        str: Shortest round-trip representation
    """
    return repr(float(value))

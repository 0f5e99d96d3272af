"""
Domain records for the harness app.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class CheckOutcome:
    """
    Verdict of one verification check.
    """

    name: str
    passed: bool
    detail: str = ""

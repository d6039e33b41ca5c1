"""Exception taxonomy shared by every module.

StructuralError covers malformed inputs: bad literals, mismatched groups,
out-of-range indices.  GuardError covers refusals where an exact algorithm
would blow past its enumeration budget.  PropertyError marks a violated
postcondition, i.e. a bug, and subclasses AssertionError on purpose so test
harnesses treat it like a failed assert.
"""

from __future__ import annotations

__all__ = ["CayleySumError", "StructuralError", "GuardError", "PropertyError"]


class CayleySumError(Exception):
    pass


class StructuralError(CayleySumError, ValueError):
    pass


class GuardError(CayleySumError, RuntimeError):
    pass


class PropertyError(CayleySumError, AssertionError):
    pass


def check(condition: bool, message: str) -> None:
    """Raise PropertyError unless a postcondition holds."""
    if not condition:
        raise PropertyError(message)

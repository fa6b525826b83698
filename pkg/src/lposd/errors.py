"""Exception types shared across the toolkit."""

from __future__ import annotations

__all__ = [
    "LposdError",
    "SingularSubmatrix",
    "InvalidParameter",
    "SamplingExhausted",
    "EnumerationTooLarge",
    "CheckWeightTooLarge",
    "Infeasible",
    "IterationLimit",
    "PreconditionViolated",
    "CycleNotFound",
]


class LposdError(Exception):
    """Base class for all toolkit errors."""


class SingularSubmatrix(LposdError):
    """A column submatrix is singular (or the restricted system is unsolvable)."""


class InvalidParameter(LposdError):
    """A construction parameter is out of range or inconsistent."""


class SamplingExhausted(LposdError):
    """Rejection sampling hit its attempt cap without an accepted sample."""


class EnumerationTooLarge(LposdError):
    """An exhaustive enumeration would exceed the configured guard."""


class CheckWeightTooLarge(LposdError):
    """A parity check is too wide for explicit subset expansion."""


class Infeasible(LposdError):
    """The linear program has no feasible point."""


class IterationLimit(LposdError):
    """The LP solver hit its iteration cap before reaching optimality."""


class PreconditionViolated(LposdError):
    """Inputs do not satisfy a documented structural precondition."""


class CycleNotFound(LposdError):
    """No cycle within the requested length bound exists."""

"""Exception hierarchy.

Every exception carries a machine-readable ``category`` so that the command
line front end and the simulation harness can count failure modes without
parsing messages.
"""

from __future__ import annotations


class ElrocError(Exception):
    """Base class for all package errors."""

    category = "error"

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "message": self.message,
            "context": {k: _jsonable(v) for k, v in self.context.items()},
        }


def _jsonable(value):
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return str(value)


class InputError(ElrocError):
    """Malformed or incomplete input data."""

    category = "input"


class ValidationError(ElrocError, ValueError):
    """A parameter violates the precondition of the requested operation."""

    category = "validation"


class DomainError(ValidationError):
    """Argument outside the mathematical domain of a function."""


class DomainConditionError(ElrocError, ValueError):
    """Thresholds do not satisfy the bracket conditions of the EL statistic."""

    category = "domain_condition"


class OrderingInfeasibleError(ElrocError):
    """No bootstrap resample with ordered class means could be drawn."""

    category = "degenerate_bootstrap"


class DegenerateScaleError(ElrocError):
    """The bootstrap median is zero or infinite, so no scale can be formed."""

    category = "degenerate_bootstrap"


class BoundaryEstimateError(ElrocError, ValueError):
    """The VUS point estimate sits on 0 or 1."""

    category = "domain_condition"


class ConventionMismatchError(ElrocError):
    """Recomputed scenario truth disagrees with the tabulated values."""

    category = "validation"

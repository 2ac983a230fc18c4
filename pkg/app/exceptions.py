"""Laboratory exception hierarchy.

Every failure the library reports is a subclass of ``LabError`` so command
handlers can map errors to exit statuses in one place.

Author: Odiseo Team
Created: 2025-11-04
Version: 1.0.0
"""

from typing import Any


class LabError(Exception):
    """Base class for all laboratory errors."""


class DegenerateInterior(LabError):
    """Interior warping radius fell to (or below) the resolvable floor.

    Attributes:
        index: Grid index of the offending point.
        value: Value of psi at that point.
    """

    def __init__(self, message: str, index: int | None = None, value: float | None = None):
        super().__init__(message)
        self.index = index
        self.value = value


class NotOrthonormal(LabError):
    """Frame vectors are not orthonormal within tolerance."""


class DtFloor(LabError):
    """Accepted time step fell below the floor or rejections were exhausted."""


class NotBlowingUp(LabError):
    """Curvature history does not look like a finite-time blow-up."""


class PivotNotFound(LabError):
    """No admissible blow-up pivot point exists on the requested side."""


class InsufficientHistory(LabError):
    """Too few snapshot slices to evaluate a time-dependent quantity."""


class ConstraintViolation(LabError):
    """A profile fails one or more family constraints.

    Attributes:
        report: Per-condition outcome (name -> details).
    """

    def __init__(self, message: str, report: dict[str, Any] | None = None):
        super().__init__(message)
        self.report = report or {}


class InconsistentEndpoints(LabError):
    """Bisection endpoints do not carry the expected verdicts."""


class NonDichotomous(LabError):
    """A bisection probe stayed unresolved after retries.

    Attributes:
        state: Bisection state at the time of failure.
    """

    def __init__(self, message: str, state: Any = None):
        super().__init__(message)
        self.state = state


class CriticalLevel(LabError):
    """Level set requested at a critical value of the potential."""


class ConfigError(LabError):
    """Run configuration is invalid.

    Attributes:
        field_path: Dotted location of the offending field, if known.
    """

    def __init__(self, message: str, field_path: str | None = None):
        super().__init__(message)
        self.field_path = field_path


class IoError(LabError):
    """Reading or writing a laboratory artifact failed."""


__all__ = [
    "LabError",
    "DegenerateInterior",
    "NotOrthonormal",
    "DtFloor",
    "NotBlowingUp",
    "PivotNotFound",
    "InsufficientHistory",
    "ConstraintViolation",
    "InconsistentEndpoints",
    "NonDichotomous",
    "CriticalLevel",
    "ConfigError",
    "IoError",
]

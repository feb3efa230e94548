"""Error hierarchy for ergoswitch.

Every failure raised by the numerical core or the batch front-end derives
from ErgoswitchError, so the CLI can catch one type and map it to an exit
code. Conditions that are part of an operation's normal contract (a
non-CPTP Kraus set, a zero-probability measurement branch, an undecidable
zero-gain check) are reported through result objects instead.
"""

from __future__ import annotations


class ErgoswitchError(Exception):
    """Base exception for all ergoswitch errors.

    Attributes:
        operation: The operation that raised this error.
        message: Human-readable error description.
    """

    def __init__(self, operation: str, message: str) -> None:
        self.operation = operation
        self.message = message
        super().__init__(f"[{operation}] {message}")


class NonHermitianError(ErgoswitchError):
    """Raised when a matrix expected to be Hermitian is not."""

    def __init__(self, operation: str, deviation: float | None = None) -> None:
        msg = "Matrix is not Hermitian"
        if deviation is not None:
            msg = f"Matrix is not Hermitian (max |M - M^dagger| = {deviation:.3e})"
        super().__init__(operation, msg)
        self.deviation = deviation


class OddDimensionError(ErgoswitchError):
    """Raised when a joint system-control matrix has odd dimension."""

    def __init__(self, operation: str, dim: int) -> None:
        super().__init__(operation, f"Joint matrix dimension {dim} is not even")
        self.dim = dim


class DimensionMismatchError(ErgoswitchError):
    """Raised when operand dimensions disagree."""

    def __init__(self, operation: str, expected: int, got: int) -> None:
        super().__init__(operation, f"Dimension mismatch: expected {expected}, got {got}")
        self.expected = expected
        self.got = got


class NotQubitError(ErgoswitchError):
    """Raised by closed forms that only exist for two-level systems."""

    def __init__(self, operation: str, dim: int) -> None:
        super().__init__(operation, f"Requires a qubit (d = 2), got d = {dim}")
        self.dim = dim


class ParameterRangeError(ErgoswitchError):
    """Raised when a channel or scenario parameter is out of range."""

    def __init__(
        self,
        operation: str,
        name: str,
        value: float,
        bounds: tuple[float, float] | None = None,
    ) -> None:
        msg = f"Parameter {name}={value!r} out of range"
        if bounds is not None:
            msg = f"Parameter {name}={value!r} outside [{bounds[0]}, {bounds[1]}]"
        super().__init__(operation, msg)
        self.name = name
        self.value = value
        self.bounds = bounds


class ConfigValidationError(ErgoswitchError):
    """Raised when a run configuration cannot be parsed or validated.

    Attributes:
        key: Dotted key of the offending entry (e.g. "control.phi"), if known.
        line: 1-based line number in the config file, if known.
    """

    def __init__(self, details: str, key: str | None = None, line: int | None = None) -> None:
        where = ""
        if key is not None:
            where = f"{key}: "
        if line is not None:
            where = f"line {line}: {where}"
        super().__init__("config", f"{where}{details}")
        self.key = key
        self.line = line
        self.details = details


__all__ = [
    "ErgoswitchError",
    "NonHermitianError",
    "OddDimensionError",
    "DimensionMismatchError",
    "NotQubitError",
    "ParameterRangeError",
    "ConfigValidationError",
]

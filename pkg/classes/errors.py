"""Exception types raised by the spectral toolkit."""

from __future__ import annotations

from typing import Sequence


class OscispecError(Exception):
    """Base class for every error the toolkit raises on purpose."""

    exit_code = 3


class InputValidationError(OscispecError, ValueError):
    """Malformed files, unsupported options or inconsistent arguments."""

    exit_code = 2


class NumericalError(OscispecError, RuntimeError):
    """A solver, quadrature or special-function evaluation failed."""

    exit_code = 3


class BracketingError(NumericalError):
    """No sign change of the Wronskian was found in the search window."""

    def __init__(self, message: str, scan: Sequence[tuple[float, float]] = ()) -> None:
        super().__init__(message)
        self.scan = tuple(scan)


class OscillationCountError(NumericalError):
    """A root was found but its eigenfunction has the wrong number of zeros."""

    def __init__(self, mode: int, expected: int, found: int, eigenvalue: float) -> None:
        super().__init__(
            f"Mode {mode}: eigenvalue {eigenvalue!r} has {found} interior zeros, expected {expected}."
        )
        self.mode = mode
        self.expected = expected
        self.found = found
        self.eigenvalue = eigenvalue


class IntegrationRangeError(NumericalError):
    """An ODE integration left its admissible range."""

    def __init__(self, message: str, x_reached: float | None = None) -> None:
        super().__init__(message)
        self.x_reached = x_reached


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""


class WeberRangeError(NumericalError, OverflowError):
    """A Weber function value lies outside the floating point range."""

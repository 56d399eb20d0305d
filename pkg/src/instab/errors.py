"""Failure modes shared across the toolkit.

Every routine that can fail for a structural (non-programming) reason raises
one of these, so callers can tell "the math said no" apart from a bug.
"""


class InstabError(Exception):
    """Base class for toolkit failures."""


class IndexUndefined(InstabError):
    """A recurrence coefficient was requested at an index where rho vanishes."""


class DegenerateFraction(InstabError, ZeroDivisionError):
    """A finite continued fraction hit a zero intermediate denominator."""


class NoConvergence(InstabError):
    """An adaptive evaluation reached its cap before meeting tolerance."""

    def __init__(self, message: str, *, depth: int | None = None,
                 width: float | None = None):
        super().__init__(message)
        self.depth = depth
        self.width = width


class NoSignChange(InstabError):
    """A bracketing search saw the same sign at both endpoints."""


class MatchFailure(InstabError):
    """Forward and backward tail values disagree at the junction index."""

    def __init__(self, message: str, *, mismatch: float | None = None,
                 tol: float | None = None):
        super().__init__(message)
        self.mismatch = mismatch
        self.tol = tol


class ThresholdNotFound(InstabError):
    """No viscosity crossing was found below the configured cap."""

    def __init__(self, message: str, *, cap: float | None = None):
        super().__init__(message)
        self.cap = cap

"""Exception types shared across the package."""

from __future__ import annotations


class FusedhsError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(FusedhsError, ValueError):
    """A distribution or matrix parameter lies outside its domain."""


class ConfigError(FusedhsError, ValueError):
    """An invalid sampler or run configuration."""


class DataError(FusedhsError, ValueError):
    """Malformed input data: bad CSV shape, missing values, degenerate columns."""


class InsufficientDrawsError(FusedhsError, ValueError):
    """Too few retained posterior draws for the requested computation."""


class NumericalSingularityError(FusedhsError, RuntimeError):
    """A symmetric factorization failed even after diagonal jitter.

    ``jitters`` records the jitter levels attempted before giving up;
    ``iteration`` is filled in by the chain runner when the failure happens
    mid-run.
    """

    def __init__(self, message: str, jitters: tuple[float, ...] = (), iteration: int | None = None):
        super().__init__(message)
        self.jitters = tuple(jitters)
        self.iteration = iteration

    def __str__(self) -> str:
        base = super().__str__()
        if self.iteration is not None:
            base = f"iteration {self.iteration}: {base}"
        if self.jitters:
            base += f" (attempted jitter levels: {list(self.jitters)})"
        return base

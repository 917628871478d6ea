"""Shared exception types."""

from __future__ import annotations


class NCPolyError(Exception):
    """Base class for all package errors."""


class ValidationError(NCPolyError):
    """Malformed or inconsistent input data (bad file, bad key, bad shape)."""


class DataIncompleteError(NCPolyError):
    """A required moment or kernel entry is not stored.

    Carries the serialized word (or kernel key) that was missing.
    """

    def __init__(self, key: str, message: str | None = None):
        self.key = key
        super().__init__(message or f"missing data for {key!r}")


class PositivityError(NCPolyError):
    """A positivity precondition failed.

    ``certificate`` maps words to the components of a unit vector whose
    quadratic form against the Gram matrix is at or below the tolerance.
    """

    def __init__(self, message: str, min_eigenvalue: float | None = None,
                 certificate: dict | None = None):
        self.min_eigenvalue = min_eigenvalue
        self.certificate = certificate
        super().__init__(message)


class ConsistencyError(NCPolyError):
    """Two routes that must agree numerically failed to do so."""


class ConvergenceError(NCPolyError):
    """A truncated series cannot reach the requested tolerance within the cap."""


class MembershipError(NCPolyError):
    """An operator tuple lies outside the required domain."""

"""Exception types shared across modules."""

from __future__ import annotations

__all__ = ["DataError", "SamplingError", "ReductionError", "InternalError"]


class DataError(ValueError):
    """Input data violates a documented precondition."""


class SamplingError(DataError):
    """A frame drops rank at a sample point."""


class ReductionError(RuntimeError):
    """A reduction was requested but its hypotheses fail."""


class InternalError(AssertionError):
    """A postcondition guaranteed by theory failed; always a bug."""

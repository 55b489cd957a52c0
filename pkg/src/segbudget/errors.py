"""Exception types shared across the package."""

from __future__ import annotations


class SegBudgetError(Exception):
    """Base class for all package errors."""


class ConfigError(SegBudgetError):
    """A configuration object violates one of its invariants."""


class EmptyScores(SegBudgetError):
    """A score vector was empty."""


class BudgetInfeasible(SegBudgetError):
    """The global budget cannot cover the per-segment minimum for all segments."""


class TruncationOutOfRange(SegBudgetError):
    """Requested a truncation length outside [1, row_count]."""


class DimensionMismatch(SegBudgetError):
    """Two vectors (or a vector and a matrix) disagree on dimension."""


class EmptySegment(SegBudgetError):
    """A segment contained no content vectors."""


class PlanMismatch(SegBudgetError):
    """Blocks handed to assembly do not line up with the allocation plan."""


class BudgetExceeded(SegBudgetError):
    """An assembled sequence would exceed the global token budget."""


class NoEvidence(SegBudgetError):
    """An assembled sequence contained no tokens to read an answer from."""


class ParseError(SegBudgetError):
    """A serialized document could not be parsed.

    ``offset`` is the byte offset of the failure where known, else 0
    (semantic errors discovered after decoding).
    """

    def __init__(self, message: str, offset: int = 0):
        super().__init__(message)
        self.offset = offset

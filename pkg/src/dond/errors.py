"""Exception hierarchy shared across the engine.

Every error raised on purpose derives from :class:`EngineError`, so callers
(CLI, HTTP layer) can distinguish engine rejections from genuine bugs.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all deliberate rejections."""


class DomainError(EngineError):
    """An input value is outside the mathematical domain of an operation."""


class RangeError(EngineError):
    """A requested output is unattainable (inverse out of range, unbounded search)."""


class ValidationError(EngineError):
    """A document or request violates its schema or structural invariants.

    ``round_index`` is the 0-based offending round when the violation is
    attributable to a single trajectory round.
    """

    def __init__(self, message: str, round_index: int | None = None):
        super().__init__(message)
        self.round_index = round_index


class BudgetError(EngineError):
    """A solve was refused because its estimated cost exceeds the configured guard."""

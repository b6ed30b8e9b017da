"""Exception hierarchy shared across the package."""

from __future__ import annotations


class NormIdError(Exception):
    """Base class for all errors raised by normid."""


class DomainError(NormIdError, ValueError):
    """A domain definition is malformed or violates a structural invariant."""


class GroundingExplosion(NormIdError):
    """Grounding would produce more instances than the configured cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"grounding would produce {count} instances (cap {cap})")
        self.count = count
        self.cap = cap


class DepthCapExceeded(NormIdError):
    """Task decomposition recursed deeper than the configured cap."""

    def __init__(self, task, cap: int):
        super().__init__(f"decomposition of {task} exceeded depth cap {cap}")
        self.task = task
        self.cap = cap


class EmptyGrammar(NormIdError):
    """No production exists for any requested goal task."""


class NoParse(NormIdError):
    """An observed action sequence is not derivable from the plan library."""

    def __init__(self, message: str, run_index: int | None = None):
        if run_index is not None:
            message = f"run {run_index}: {message}"
        super().__init__(message)
        self.run_index = run_index


class StateMismatch(NormIdError):
    """Replaying a parsed plan hit an inapplicable action or method."""

    def __init__(self, message: str, run_index: int | None = None):
        if run_index is not None:
            message = f"run {run_index}: {message}"
        super().__init__(message)
        self.run_index = run_index


class NoCompliantPlan(NormIdError):
    """Planted norms rule out every plan for a goal."""


class InvalidThreshold(NormIdError, ValueError):
    """A learning threshold is not strictly positive."""

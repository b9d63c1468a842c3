"""Shared error types. Every error carries an API code so the service layer
can map exceptions to wire errors without inspecting types one by one."""

from __future__ import annotations


class PromptMapError(Exception):
    """Base class for all library errors."""

    code = "validation"
    retryable = False

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details


class ValidationError(PromptMapError):
    code = "validation"


class NotFoundError(PromptMapError):
    code = "not_found"


class InvalidStateError(PromptMapError):
    code = "invalid_state"


class FormatError(PromptMapError):
    """Malformed external data: lexicon files, session documents, unknown schema versions."""

    code = "format"


class ProviderError(PromptMapError):
    """A chat/embedding/image provider failed after retries."""

    code = "provider"
    retryable = True

    def __init__(self, message: str, *, attempts: int = 1, retry_after: float | None = None, **details):
        super().__init__(message, **details)
        self.attempts = attempts
        self.retry_after = retry_after


class PartialResultError(ProviderError):
    """An image provider returned fewer results than requested."""

    def __init__(self, message: str, *, successes: list | None = None, **kwargs):
        super().__init__(message, **kwargs)
        self.successes = successes or []


class PoolExhaustedError(PromptMapError):
    """No eligible candidate remains; the caller may regenerate the pool."""

    code = "pool_exhausted"


class EmptyPoolError(PoolExhaustedError):
    """Candidate parsing or filtering produced no candidates at all."""

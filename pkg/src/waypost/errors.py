"""Domain exceptions, each with a machine-readable error code for the wire."""

from __future__ import annotations


class WaypostError(Exception):
    """Base class for all domain errors."""

    default_code = "error"

    def __init__(self, message: str, *, code: str | None = None):
        super().__init__(message)
        self.code = code or self.default_code


class ValidationError(WaypostError):
    default_code = "validation"


class NotFoundError(WaypostError):
    default_code = "not_found"


class StateError(WaypostError):
    """Request is well-formed but the caller is in the wrong state for it."""

    default_code = "conflict"


class AuthError(WaypostError):
    default_code = "auth"


class PseudonymTakenError(WaypostError):
    default_code = "pseudonym_taken"


class CapacityError(WaypostError):
    default_code = "capacity"


class RateLimitError(WaypostError):
    default_code = "rate_limited"


class PersistenceError(WaypostError):
    default_code = "persistence"


class AdapterError(WaypostError):
    """A geocoder backend failed; callers degrade rather than surface this."""

    default_code = "adapter"

from .base import (
    ContractError,
    Context,
    NotFound,
    ReadOnlyViolation,
    Unauthorized,
    canonical_json,
)

__all__ = [
    "ContractError",
    "Context",
    "NotFound",
    "ReadOnlyViolation",
    "Unauthorized",
    "canonical_json",
]

"""Engine error type with stable machine-readable codes.

Every error surfaced by the engine, the store, or the API carries one of
the codes below so callers can branch on behaviour instead of parsing
messages. The HTTP layer maps these 1:1 onto the error envelope.
"""

from __future__ import annotations

# Catalog / document loading
SCHEMA_VERSION_UNSUPPORTED = "SCHEMA_VERSION_UNSUPPORTED"
DANGLING_REFERENCE = "DANGLING_REFERENCE"
MALFORMED = "MALFORMED"

# Lookups
UNKNOWN_ID = "UNKNOWN_ID"
UNKNOWN_REF = "UNKNOWN_REF"
NO_FACTOR_ROW = "NO_FACTOR_ROW"

# Engine computation
EMPTY_FACTORS = "EMPTY_FACTORS"
ZERO_COST = "ZERO_COST"
CURRENCY_MISMATCH = "CURRENCY_MISMATCH"
INVALID_CONFIG = "INVALID_CONFIG"
OUT_OF_RANGE = "OUT_OF_RANGE"

# Orchestration
VALIDATION_FAILED = "VALIDATION_FAILED"
UNKNOWN_ENTITY = "UNKNOWN_ENTITY"
STALE_CATALOG = "STALE_CATALOG"

# Persistence
NOT_FOUND = "NOT_FOUND"
VERSION_CONFLICT = "VERSION_CONFLICT"


class QberError(Exception):
    """Exception carrying a stable error code plus structured details."""

    def __init__(self, code: str, message: str, details: list | None = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.details = details if details is not None else []

    def to_envelope(self) -> dict:
        """Render the single error envelope used by the API and the CLI."""
        return {"code": self.code, "message": self.message, "details": self.details}

    def __repr__(self) -> str:  # pragma: no cover
        return f"QberError({self.code!r}, {self.message!r})"

"""Exception types shared across the toolkit."""


class ClozeAuditError(Exception):
    """Base class for toolkit errors."""


class InvalidPatternError(ClozeAuditError, ValueError):
    """Empty or otherwise unusable search pattern."""


class RecordDecodeError(ClozeAuditError, ValueError):
    """A corpus line could not be decoded or parsed as a record."""


class RecordSchemaError(ClozeAuditError, ValueError):
    """A corpus record parsed but is missing required fields."""


class TimelineFormatError(ClozeAuditError, ValueError):
    """Timeline CSV is structurally unreadable (missing/invalid header)."""


class TimelineValidationError(ClozeAuditError, ValueError):
    """One or more timeline rows violate the event schema.

    ``violations`` is a list of (row_number, rule, detail) triples; row numbers
    are 1-based counting the header as row 1.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"row {r}: {rule} ({detail})" for r, rule, detail in self.violations)
        super().__init__(f"timeline validation failed: {lines}")


class ProviderError(ClozeAuditError, RuntimeError):
    """A model provider call failed permanently.

    ``attempts`` records how many transport attempts were made and
    ``request_digest`` identifies the failing request.
    """

    def __init__(self, message, *, attempts=1, request_digest=None, kind="error"):
        super().__init__(message)
        self.attempts = attempts
        self.request_digest = request_digest
        self.kind = kind


class UndefinedSimilarityError(ClozeAuditError, ValueError):
    """Similarity is undefined (zero vector or empty-after-tokenization text)."""


class DegenerateDataError(ClozeAuditError, ValueError):
    """Statistical input is degenerate (single class, zero variance, all-zero diffs)."""

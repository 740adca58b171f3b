"""Exception hierarchy shared across the package."""


class JobMatchError(Exception):
    """Base class for all package errors."""


class ConfigError(JobMatchError):
    """Invalid scoring configuration or threshold value."""


class GeocodeError(JobMatchError):
    """Address lookup failed (client error or zero results)."""

    def __init__(self, address: str, reason: str = "lookup failed"):
        self.address = address
        super().__init__(f"geocoding failed for {address!r}: {reason}")


class CacheParseError(JobMatchError):
    """Malformed row in a persisted geocoding cache."""

    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"cache line {line}: {reason}")


class EmptyVocabularyError(JobMatchError):
    """Corpus produced no usable terms (stop words only)."""


class ScoringError(JobMatchError):
    """A scoring input is missing or unusable (geocode, tfidf model)."""


class ParameterError(JobMatchError):
    """Invalid parameter for a learning or auditing operation."""


class DegenerateDataError(JobMatchError):
    """Training data cannot support the requested fit (e.g. single class)."""


class ShapeError(JobMatchError):
    """Input arrays have the wrong length or mismatched lengths."""


class IngestError(JobMatchError):
    """File-level CSV problem (missing column, unreadable file)."""

"""
Custom error types for the range-clustering engine.

Every error raised on purpose by the package derives from
`RangeClusteringError`, and each family carries the process exit code the
console uses when it surfaces there.
"""


class RangeClusteringError(Exception):
    """
    Base error of the package.

    Attributes
    ----------
    exit_code: int
        Status returned by the command line when this error escapes.
    """

    exit_code = 3


class UsageError(RangeClusteringError):
    """Wrong arguments or unsupported combinations of them."""

    exit_code = 1


class QuerySpecError(UsageError):
    """A query that cannot be answered as stated (bad k, bad range)."""


class ConfigurationError(UsageError):
    """Build parameters or environment values that fail validation."""


class OracleLimitError(UsageError):
    """The exhaustive oracle was asked for more points or centers than it enumerates."""


class DataError(RangeClusteringError):
    """Input data that cannot be ingested."""

    exit_code = 2


class EmptyInputError(DataError):
    """No points where at least one is required."""


class NonFiniteError(DataError):
    """A coordinate or weight is NaN or infinite."""


class DimensionError(DataError):
    """The dataset dimension is outside the supported range."""


class BundleFormatError(DataError):
    """An index bundle with a wrong magic, version or payload size."""


class InvariantViolation(RangeClusteringError):
    """An internal consistency check failed."""

    exit_code = 3

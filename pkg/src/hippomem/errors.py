"""Exception types shared across the package.

The CLI maps these onto exit codes, so everything user-facing should raise
one of them (or ValueError for plain bad arguments) rather than asserting.
"""


class HippomemError(Exception):
    """Base class for package-specific failures."""


class ConfigError(HippomemError):
    """Invalid configuration: bad shapes, unknown keys, out-of-range values."""


class DataError(HippomemError):
    """Unreadable or malformed dataset files."""


class UndefinedCorrelationError(ValueError):
    """Pearson correlation requested for a zero-variance vector."""

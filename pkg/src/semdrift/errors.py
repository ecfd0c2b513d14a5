"""Exception hierarchy shared across the toolkit.

Exit-code mapping used by the CLI: ConfigError -> 2, DataError -> 3,
NumericError -> 4.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(ToolkitError):
    """Invalid configuration or invalid operation parameters."""

    exit_code = 2


class DataError(ToolkitError):
    """Malformed or insufficient input data."""

    exit_code = 3


class NumericError(ToolkitError):
    """Numeric failure (non-finite values, SVD non-convergence, degenerate input)."""

    exit_code = 4

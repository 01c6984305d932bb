"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
NumericError -> 3.
"""


class ConfigError(ValueError):
    """Invalid configuration or command usage."""


class DataError(ValueError):
    """Unreadable, malformed, or insufficient input data."""


class NumericError(RuntimeError):
    """Numeric failure: NaN loss/gradient or a solver that cannot certify its result."""

"""Exception hierarchy shared by all pipeline stages."""


class PneugenError(Exception):
    """Base class for all pipeline errors."""


class ConfigError(PneugenError):
    """Invalid configuration: bad bounds, impossible counts, missing files."""


class DataError(PneugenError):
    """Malformed or inconsistent data: bad CSV, dimension mismatch, unknown ids."""


class NumericError(PneugenError):
    """Numerical failure: non-positive-definite covariance, degenerate input."""

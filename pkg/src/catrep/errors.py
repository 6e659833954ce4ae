"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class CatrepError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigError(CatrepError):
    """Invalid configuration: bad flag values, kernel tokens, parameter ranges."""

    exit_code = 2


class DataError(CatrepError):
    """Invalid or inconsistent data: ragged CSV rows, unseen values, shape mismatches."""

    exit_code = 4


class NumericError(CatrepError):
    """Numerical failure: non-finite matrices or gradients."""

    exit_code = 5

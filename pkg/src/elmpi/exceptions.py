"""Exception hierarchy shared by the library and the CLI."""


class ElmpiError(Exception):
    """Base class for all errors raised by elmpi."""


class ConfigError(ElmpiError, ValueError):
    """Invalid or inconsistent configuration."""


class DataError(ElmpiError, ValueError):
    """Malformed, missing or invariant-violating data."""


class NumericError(ElmpiError, ArithmeticError):
    """Non-finite values or dimension mismatches in numerical routines."""

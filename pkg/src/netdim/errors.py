"""Shared exception types.

The CLI maps these to exit codes: InputError -> 2, NumericError -> 3.
"""


class NetdimError(Exception):
    """Base class for all toolkit errors."""


class InputError(NetdimError, ValueError):
    """Malformed files, invalid parameters, or impossible requests."""


class NumericError(NetdimError, ArithmeticError):
    """A computation could not produce a usable result."""

"""Exception types shared across the package.

Validation problems (bad parameters, malformed input) raise
:class:`ValidationError`; enumerations that would exceed an explicit
capacity cap raise :class:`CapacityError` instead of silently truncating.
"""

from __future__ import annotations


class PwnormError(Exception):
    """Base class for all package errors."""


class ValidationError(PwnormError, ValueError):
    """Invalid parameters, malformed structures, or contract violations."""


class ArityError(ValidationError):
    """Index arity does not match the structure it is used with."""


class SupportError(ValidationError):
    """A vector or assignment mentions points outside the allowed support."""


class CapacityError(PwnormError):
    """An enumeration would exceed a configured capacity cap."""


class UndecidableWeightError(PwnormError):
    """A symbolic query is not decidable for the given weight descriptor."""


class NormOverflowError(PwnormError):
    """A norm computation produced a non-finite intermediate value."""


class ParseError(ValidationError):
    """Config or vector file could not be parsed.

    Carries a human-readable location (line/column) in the message.
    """

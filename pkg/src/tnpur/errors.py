"""Exception types shared across the package.

Every error raised on a bad input or an exceeded resource budget derives
from :class:`TnpurError`, so callers can keep a single except clause at
the boundary.  Numerical failures (an iteration that did not converge, a
transfer operator too degenerate to analyse) raise :class:`NumericError`
instead of returning garbage.
"""

from __future__ import annotations


class TnpurError(Exception):
    """Base class for all package-specific errors."""


class ModeError(TnpurError):
    """An operation received a tensor in the wrong arithmetic mode."""


class SchemaError(TnpurError):
    """A JSON document does not match the expected on-disk format."""


class ResourceCapError(TnpurError):
    """A dense enumeration would exceed the configured component cap."""


class DegenerateInputError(TnpurError):
    """An input is degenerate for the requested operation (e.g. a state
    of zero norm where a normalised comparison is required)."""


class NumericError(TnpurError):
    """A numerical routine failed to converge or hit an instability it
    cannot resolve at the requested tolerance."""

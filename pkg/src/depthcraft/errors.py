"""Exception types shared across the package.

All data/parameter problems derive from ``ValueError`` so callers that do not
care about the fine-grained class can catch the usual built-in. ``SolverError``
derives from ``RuntimeError`` because it signals a numerical failure, not a
bad argument.
"""

from __future__ import annotations


class DepthcraftError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(DepthcraftError, ValueError):
    """An argument is outside its documented domain."""


class FormatError(DepthcraftError, ValueError):
    """A file or table does not have the expected shape or content."""


class DegenerateDataError(DepthcraftError, ValueError):
    """The data does not carry enough information for the operation.

    Raised for rank-deficient scatter matrices, zero spread along every
    projection direction, and similar situations.
    """


class SizeError(DepthcraftError, ValueError):
    """An exact algorithm was asked to run above its configured size cap."""


class SolverError(DepthcraftError, RuntimeError):
    """A numerical routine failed after its internal retry."""

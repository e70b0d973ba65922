"""Pinching constants and verification suites for CMC hypersurface gap theorems."""

__version__ = "0.1.0"

from .errors import DegenerateInputError, DomainError, GapToolkitError, UsageError

__all__ = [
    "__version__",
    "DegenerateInputError",
    "DomainError",
    "GapToolkitError",
    "UsageError",
]

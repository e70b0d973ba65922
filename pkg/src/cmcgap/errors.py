"""Exception hierarchy. Everything subclasses ValueError so callers can catch broadly."""


class GapToolkitError(ValueError):
    """Base class for all toolkit errors."""


class DomainError(GapToolkitError):
    """A formula was evaluated outside its real domain (e.g. a negative radicand)."""


class UsageError(GapToolkitError):
    """An argument is out of its documented range (k, n, g, band position...)."""


class DegenerateInputError(GapToolkitError):
    """Input collapses to a degenerate object (zero trace-free part, umbilical model)."""

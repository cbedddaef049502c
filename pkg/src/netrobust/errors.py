"""Exception types shared across the toolkit."""


class NetrobustError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(NetrobustError, ValueError):
    """An argument or data structure violates a documented contract."""


class FormatError(NetrobustError, ValueError):
    """A file or byte stream does not conform to its declared format."""


class GenerationError(NetrobustError, RuntimeError):
    """A random construction failed to terminate within its guard budget."""

"""Exception types shared across the package."""


class EmdenlabError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(EmdenlabError, ValueError):
    """Input outside the domain of validity of an operation."""


class NumericalError(EmdenlabError, RuntimeError):
    """A numerical procedure failed to converge or produced inconsistent results."""

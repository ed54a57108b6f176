"""Exception hierarchy shared by all modules."""


class FractraceError(Exception):
    """Base class for all package errors."""


class DimensionError(FractraceError, ValueError):
    pass


class DomainError(FractraceError, ValueError):
    pass


class ParameterError(FractraceError, ValueError):
    """A parameter violates a documented constraint or hypothesis."""


class AccuracyError(FractraceError, ArithmeticError):
    """A numerical routine could not reach its requested tolerance."""


class ResolutionWarning(UserWarning):
    """The discretisation does not resolve the requested object."""

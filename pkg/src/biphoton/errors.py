"""Exception hierarchy shared by every module.

The CLI maps :class:`ValidationError` subclasses to exit status 1 and
:class:`NumericalError` subclasses to exit status 2.
"""


class BiphotonError(Exception):
    """Base class for all package errors."""


class ValidationError(BiphotonError, ValueError):
    """Invalid user input (configs, parameters)."""


class NumericalError(BiphotonError, ArithmeticError):
    """A numerical routine could not deliver the requested accuracy."""


class NonConvergence(NumericalError):
    pass


class BadGrid(ValidationError):
    pass


class NoCrossing(NumericalError):
    pass


class DomainError(ValidationError):
    pass


class MissingField(ValidationError):
    pass


class DegenerateState(NumericalError):
    """Quantity undefined for a separable (N = 1) state."""


class EnvelopeViolation(NumericalError):
    """Rejection sampler envelope fell below the target density."""


class InsufficientData(NumericalError):
    pass


class NegativeVariance(NumericalError):
    """Deconvolution removed more variance than the histogram holds."""


class ConfigError(ValidationError):
    pass


class ParaxialWarning(UserWarning):
    """Transverse momentum is large enough that the small-angle model degrades."""

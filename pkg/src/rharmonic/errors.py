"""Exception types shared across the workbench."""


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class MismatchedJets(WorkbenchError):
    """Jets with different base points or orders were combined."""


class DivisionByZeroLeadCoefficient(WorkbenchError, ZeroDivisionError):
    """Series division by a jet whose constant term vanishes."""


class DomainError(WorkbenchError, ValueError):
    """A function was evaluated outside its domain of smoothness."""


class OrderTooLow(WorkbenchError, ValueError):
    """A jet does not carry enough Taylor coefficients for the request."""


class NonFiniteSample(WorkbenchError, ArithmeticError):
    """An integrand returned NaN or infinity."""


class DegreeTooHigh(WorkbenchError, ValueError):
    """Polynomial degree exceeds what the root finder supports."""


class NotSymmetric(WorkbenchError, ValueError):
    """Matrix handed to the symmetric eigensolver is not symmetric."""


class PoleError(WorkbenchError, ValueError):
    """A warp function vanishes where a reduction divides by it."""


class CertificateFailure(WorkbenchError):
    """The positivity tail of a spectrum could not be certified."""


class NotCriticalWarning(UserWarning):
    """Second variation requested at a configuration that is not critical."""

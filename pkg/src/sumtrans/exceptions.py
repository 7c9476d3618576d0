"""Exception hierarchy shared by every module of the package."""


class SumTransError(Exception):
    """Base class for all errors raised by :mod:`sumtrans`."""


class InvalidParameterError(SumTransError, ValueError):
    """A constructor received an out-of-range or malformed parameter."""


class InvalidKernelError(SumTransError, ValueError):
    """A piecewise kernel description is inconsistent (e.g. junction mismatch)."""


class DomainError(SumTransError, ValueError):
    """An evaluation point lies outside the domain of the function."""


class NotRegularError(SumTransError):
    """The node system is not in the regularity set.

    Attributes
    ----------
    index : int or None
        Index ``j`` of the first interval whose maximum is ``-inf``.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NotApplicableError(SumTransError):
    """A method's preconditions do not hold; the caller should fall back."""


class InvalidProblemError(SumTransError):
    """The problem lies outside every class for which a unique solution is guaranteed."""


class ConvergenceError(SumTransError):
    """An iterative procedure stopped without meeting its tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report

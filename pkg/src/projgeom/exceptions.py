"""Exception hierarchy.

Two families are kept apart so the command line can map them onto distinct
exit codes: malformed input (:class:`InputError`) versus inputs that are
well formed but fall outside the mathematical hypotheses of an operation
(:class:`PreconditionError`).
"""


class ProjGeomError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ProjGeomError, ValueError):
    """Input has the wrong shape, type or file format."""


class DimensionMismatchError(InputError):
    pass


class PreconditionError(ProjGeomError, ArithmeticError):
    """A mathematical hypothesis of the requested operation is violated."""


class NotConvergedError(PreconditionError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DomainError(PreconditionError):
    """A scalar function is undefined at an eigenvalue."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class NotPSDError(PreconditionError):
    pass


class SingularMatrixError(PreconditionError):
    pass


class NotAGraphError(PreconditionError):
    """``||P - Q|| >= 1``: Ran Q is not the graph of a bounded operator."""


class InconsistentPairError(PreconditionError):
    pass


class HypothesisViolatedError(PreconditionError):
    pass


class NoGapError(PreconditionError):
    pass


class GapClosedError(PreconditionError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class DivergentIntegralError(PreconditionError):
    pass


class PoleError(PreconditionError):
    pass


class TooFewSamplesError(InputError):
    pass

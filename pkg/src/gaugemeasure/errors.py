"""Exception hierarchy shared by all modules."""


class GaugeMeasureError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GaugeMeasureError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PreconditionError(GaugeMeasureError, ValueError):
    """A documented precondition on the inputs is violated."""


class ConvergenceError(GaugeMeasureError, RuntimeError):
    """An iteration or series failed to converge within its cap."""


class IllConditionedError(GaugeMeasureError, ArithmeticError):
    """The requested computation is too ill-conditioned in double precision."""


class InsufficientDataError(GaugeMeasureError, ValueError):
    """Not enough usable samples survived filtering to produce a result."""


class NonInjectiveError(GaugeMeasureError, ValueError):
    """Sampled values show the map is not injective on the sample set."""

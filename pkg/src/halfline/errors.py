"""Exception and warning classes raised across the package."""


class HalflineError(Exception):
    """Base class for all errors raised by halfline."""


class ArgumentError(HalflineError, ValueError):
    pass


class RangeError(HalflineError, ValueError):
    """A parameter lies outside the range an operation supports."""


class PoleError(HalflineError, ZeroDivisionError):
    pass


class ConvergenceError(HalflineError, ArithmeticError):
    """Two evaluation branches disagree, or a series failed to converge."""


class GridMismatch(HalflineError, ValueError):
    pass


class BandExhausted(HalflineError):
    """A dilated or translated function leaves the grid."""


class ResolutionError(HalflineError):
    """The grid does not resolve the oscillation or support of a transform."""


class WindowError(HalflineError):
    """A truncated integration window leaves too much tail mass."""


class GridAsymmetric(HalflineError, ValueError):
    pass


class WronskianError(HalflineError):
    pass


class FitUnstable(HalflineError):
    pass


class ExtrapolationUnstable(HalflineError):
    pass


class RegimeError(HalflineError, ValueError):
    pass


class NoRoot(HalflineError):
    pass


class IntegerFlux(HalflineError, ValueError):
    pass


class NearPoleWarning(RuntimeWarning):
    """Integer-order regularization was engaged very close to a pole of 1/sin(m*pi)."""

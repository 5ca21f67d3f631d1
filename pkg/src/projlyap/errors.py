"""Exception hierarchy shared across the package.

Input-side problems (bad files, bad dimensions, measures a routine cannot
handle) derive from InputError; numerical failures that occur on valid
input (iteration budgets, non-converging eigensolves) derive from
NumericalError.  The command line maps the two branches to distinct exit
codes.
"""


class ProjlyapError(Exception):
    """Base class for all package errors."""


class InputError(ProjlyapError):
    """Malformed or out-of-contract input."""


class NonInvertible(InputError):
    """Matrix is singular to working precision."""


class NotSymmetric(InputError):
    """Symmetric input was required."""


class RankDeficient(InputError):
    """Matrix has numerically dependent columns."""


class UnsupportedMeasure(InputError):
    """The measure kind or size is outside what the routine supports."""


class InvalidLambdaStar(InputError):
    """Normalization scale violates the contraction requirement."""


class NumericalError(ProjlyapError):
    """Failure of an iterative scheme on otherwise valid input."""


class NoConvergence(NumericalError):
    """Iteration budget exhausted before the target tolerance.

    Carries the last bracket or estimate so callers can report how close
    the iteration got.
    """

    def __init__(self, message, last_estimate=None):
        super().__init__(message)
        self.last_estimate = last_estimate


class BudgetExceeded(NumericalError):
    """A series was truncated before its tail bound met the tolerance.

    The partially evaluated result is attached when available.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result

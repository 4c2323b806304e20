"""Exception types raised by the solver library."""


class SolverError(Exception):
    """Base class for every error raised by this package."""


class MissingSide(SolverError):
    """A piecewise field was evaluated at the jump point without a side."""


class OutOfDomain(SolverError):
    """Evaluation point lies outside [0, 1] x [0, T]."""


class UnknownExample(SolverError):
    pass


class BadN(SolverError):
    """Mesh size is not a multiple of 4 or is smaller than 8."""


class IndexOutOfRange(SolverError):
    pass


class SingularEliminationPivot(SolverError):
    """The interface elimination would divide by (nearly) zero."""


class ZeroPivot(SolverError):
    """Forward elimination hit a pivot below the admissible magnitude."""


class DegenerateError(SolverError):
    """An order of convergence was requested from a non-positive error."""


class StepFailure(SolverError):
    """Wraps an error raised while advancing from time level ``j``."""

    def __init__(self, j: int, cause: Exception):
        self.j = j
        self.cause = cause
        super().__init__(f"time step j={j}: {type(cause).__name__}: {cause}")

    def __reduce__(self):
        return (type(self), (self.j, self.cause))

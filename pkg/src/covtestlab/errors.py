"""Exception hierarchy shared by all covtestlab modules."""


class CovTestLabError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(CovTestLabError, ValueError):
    """An argument is outside its documented domain."""


class DegenerateColumnError(ParameterError):
    """A design column has zero variance and cannot be standardized."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"column {index} is constant")


class ContractError(CovTestLabError, ValueError):
    """Input violates a solver precondition (e.g. unstandardized columns)."""


class RankDeficiencyError(CovTestLabError, ArithmeticError):
    """Active-set Gram matrix is singular."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"singular active Gram matrix at step {step}")


class ConvergenceError(CovTestLabError, ArithmeticError):
    def __init__(self, message, residual=float("nan")):
        self.residual = residual
        super().__init__(message)


class MonotonicityError(CovTestLabError, ArithmeticError):
    """Coordinate descent objective increased between sweeps."""


class NotApplicableError(CovTestLabError, ValueError):
    """The requested statistic is undefined for this path event."""


class NeedsNextKnotError(CovTestLabError, ValueError):
    """The statistic at step k needs the knot of event k+1, which is missing."""

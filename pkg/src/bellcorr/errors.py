"""Exception hierarchy shared by all bellcorr modules."""


class BellcorrError(Exception):
    """Base class for every error raised by this package."""


class InputError(BellcorrError, ValueError):
    """An argument violates a documented precondition."""


class ConvergenceError(BellcorrError):
    """An iterative solver exhausted its budget."""


class DegenerateGroundError(InputError):
    """The lowest Hamiltonian level is (numerically) degenerate."""


class FitError(BellcorrError):
    """Not enough usable points for a decay fit."""


class EstimationError(BellcorrError):
    """Every sample was rejected by the estimator."""


class InvariantViolation(BellcorrError):
    """A computed quantity lies outside a proven bound."""


class ScenarioError(BellcorrError):
    """A scenario file failed validation.

    ``errors`` holds one human-readable message per offending field.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))

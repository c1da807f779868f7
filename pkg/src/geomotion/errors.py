"""Exception hierarchy.

Two families, matching the CLI exit-code contract: ``InputError`` (bad
files, bad arguments, mismatched dimensions -> exit 2) and
``NumericalError`` (singular metrics, divergence, failed solves -> exit 1).
"""


class GeomotionError(Exception):
    """Base class for all package errors."""


class InputError(GeomotionError):
    """Invalid user input: files, arguments, dimensions, base mismatches."""


class ModelError(InputError):
    """Robot description could not be parsed or violates an invariant."""


class BaseMismatchError(InputError):
    """A tangent vector was used at a configuration it is not based at."""


class NumericalError(GeomotionError):
    """A numerical procedure failed."""


class SingularMetricError(NumericalError):
    """The mass-inertia matrix is not positive definite.

    Carries the trajectory time at which the singularity was hit when the
    failure happened mid-integration (``time`` is None otherwise).
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class DivergenceError(NumericalError):
    """Integration produced non-finite state or exceeded the velocity guard."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ConvergenceError(NumericalError):
    """An iterative solver stopped without reaching its tolerance."""

    def __init__(self, message, best_residual=None, iterations=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.iterations = iterations

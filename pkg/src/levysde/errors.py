"""Exception hierarchy shared across the package.

Each class carries the process exit code the command-line tool uses when
the error escapes to the top level: 1 for usage/configuration problems,
2 for bad input data, 3 for numerical failures.
"""


class LevySdeError(Exception):
    exit_code = 3


class ParameterError(LevySdeError):
    """Distribution or model parameters outside their valid domain."""

    exit_code = 1


class ConfigurationError(LevySdeError):
    """Inconsistent run configuration or model structure."""

    exit_code = 1


class DataError(LevySdeError):
    """Malformed, degenerate, or non-conforming input data."""

    exit_code = 2


class NumericalError(LevySdeError):
    exit_code = 3


class QuadratureError(NumericalError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class SimulationError(NumericalError):
    """Path generation failed (typically an exploding trajectory)."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class OptimizationError(NumericalError):
    """The likelihood optimizer could not make progress."""


class InitializationError(NumericalError):
    """Automatic parameter initialization failed."""

"""Exception hierarchy shared by all modules."""


class PrandtlError(Exception):
    """Base class for every error raised by this package."""


class DomainError(PrandtlError, ValueError):
    """An argument lies outside the domain of the operation."""


class GridError(PrandtlError, ValueError):
    """Invalid grid parameters or mismatched grids."""


class SamplingError(PrandtlError, ValueError):
    """A sampled function returned a non-finite value."""


class QuadratureError(PrandtlError, RuntimeError):
    """An oracle quadrature did not reach its accuracy target.

    ``estimate`` holds the best value obtained and ``error`` the last
    observed change between refinements.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SpecError(PrandtlError, ValueError):
    """Problem data violating the admissibility conditions."""


class OracleError(PrandtlError, RuntimeError):
    """The Glauert collocation system could not be solved."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ConvergenceError(PrandtlError, RuntimeError):
    """Conjugate gradients hit the iteration cap."""

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class ConfigError(PrandtlError, ValueError):
    """Malformed or out-of-range run configuration."""

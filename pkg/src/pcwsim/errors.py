"""Exception types shared across the package."""


class PcwsimError(Exception):
    """Base class for all package-specific errors."""


class SolverError(PcwsimError):
    """A linear solve or integration failed numerically.

    Carries the probe detuning at which the failure occurred so that
    ensemble drivers can report and skip the offending grid point.
    """

    def __init__(self, message, delta=None):
        super().__init__(message)
        self.delta = delta


class DegenerateSteadyStateError(SolverError):
    """The Liouvillian null space has dimension > 1 (no unique steady state)."""

    def __init__(self, message, null_dim):
        super().__init__(message)
        self.null_dim = null_dim


class WeakReflectionError(PcwsimError):
    """Reflected signal too weak to normalize a correlation function."""


class EnsembleFailureError(PcwsimError):
    """Too many per-sample solver failures during a Monte Carlo run."""

    def __init__(self, message, n_failed, n_total):
        super().__init__(message)
        self.n_failed = n_failed
        self.n_total = n_total


class ConfigError(PcwsimError):
    """Run configuration could not be parsed or validated."""

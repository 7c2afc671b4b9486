"""Exception classes shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific class that applies.
"""


class CouplingError(Exception):
    """Base class for all package errors."""


class ConfigError(CouplingError):
    """Invalid configuration: bad key, bad value, or inconsistent parameters."""


class GeometryError(CouplingError):
    """Impossible geometry: evaluation on the wire, overlapping cells."""


class DomainError(CouplingError):
    """Model evaluated outside its validity domain (e.g. sub-critical drive)."""


class DataError(CouplingError):
    """Measurement data that cannot be analyzed as requested."""


class FitError(CouplingError):
    """Fit failed: degenerate design or no convergence.

    Carries the best iterate when one exists so callers can inspect it.
    """

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual

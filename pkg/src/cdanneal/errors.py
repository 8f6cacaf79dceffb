"""Exception types shared across the package."""


class CdAnnealError(Exception):
    """Base class for all package-specific errors."""


class ScheduleDomainError(CdAnnealError, ValueError):
    """Time argument outside the anneal window [0, total_time]."""


class DegeneratePointError(CdAnnealError, ValueError):
    """Coefficient formula evaluated at a point where its denominator vanishes."""


class BasisMismatchError(CdAnnealError, ValueError):
    """Two state vectors that should share a basis do not."""


class SizeLimitError(CdAnnealError, ValueError):
    """System size outside the supported range of a builder."""


class IntegrationError(CdAnnealError, RuntimeError):
    """Time integration violated its accuracy contract.

    Carries the diagnostics of the failed run in ``diagnostics`` when
    available.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class ConfigError(CdAnnealError, ValueError):
    """Invalid run configuration (bad schema, values, or combination)."""

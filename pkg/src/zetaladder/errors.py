"""Exception hierarchy shared by the numeric and symbolic layers."""


class ZetaLadderError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ZetaLadderError, ValueError):
    """An argument lies outside the validity range of an evaluator."""


class AccuracyError(ZetaLadderError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best estimate reached so far is kept in ``estimate`` together with
    the error estimate in ``error``.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class InversionError(ZetaLadderError):
    """A bracketed inversion of the ladder failed (bad bracket or cache)."""


class ExtractionError(ZetaLadderError):
    """No mean-value point could be located on a segment."""


class ConfigError(ZetaLadderError):
    """Inconsistent or incomplete run configuration."""

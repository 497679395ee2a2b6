"""Exception types shared across the package."""


class ExtremeChainsError(Exception):
    """Base class for all package errors."""


class DomainError(ExtremeChainsError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ValidationError(ExtremeChainsError, ValueError):
    """Parameter outside its admissible range; message names the violated range."""


class BracketingError(ExtremeChainsError):
    """Root finder was given an interval without a sign change."""


class AccuracyError(ExtremeChainsError):
    """Quadrature failed to reach the requested tolerance.

    Carries the best available estimate in ``best``.
    """

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


class ConvergenceError(ExtremeChainsError):
    """Iterative solver failed to converge."""


class UnsupportedSchemeError(ExtremeChainsError, KeyError):
    """Requested norming scheme or update family is not in the catalogue."""


class UnsupportedLawError(ExtremeChainsError, KeyError):
    """Requested limit law is unknown or underivable."""


class RegimeError(ExtremeChainsError):
    """Simulator invoked outside its theorem regime (e.g. limit law with atoms)."""


class SamplingError(ExtremeChainsError):
    """Inverse-CDF sampling failed; reports the conditioning state and uniform draw."""

    def __init__(self, message, x=None, u=None):
        super().__init__(message)
        self.x = x
        self.u = u

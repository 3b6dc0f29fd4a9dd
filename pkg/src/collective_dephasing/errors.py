"""Exception types shared across the package."""


class DephasingError(Exception):
    """Base class for all package errors."""


class ValidationError(DephasingError, ValueError):
    """Input violates a documented invariant (normalization, Hermiticity, shape...)."""


class SizeError(DephasingError, ValueError):
    """Register or Hilbert-space dimension exceeds a hard cap."""


class DomainError(DephasingError, ValueError):
    """Argument outside the mathematical domain of a function."""


class UnsupportedModelError(DephasingError, TypeError):
    """Operation is not defined for the given spectral model."""


class NumericalError(DephasingError, ArithmeticError):
    """Quadrature failure or a numerical-consistency check tripped."""


class NoRootError(NumericalError):
    """Root search found no sign change in its window."""


class DecodeError(DephasingError, ValueError):
    """State has weight outside the pair-code image."""

    def __init__(self, message, leaked_weight):
        super().__init__(message)
        self.leaked_weight = leaked_weight


class ConfigError(DephasingError, ValueError):
    """Scenario configuration could not be parsed or is inconsistent."""


class TruncationWarning(UserWarning):
    """Fock truncation may be too small for the requested evolution."""

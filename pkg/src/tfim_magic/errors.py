"""Exception types shared across the package."""


class InvalidSizeError(ValueError):
    """System size is not a positive even integer."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class SizeGuardError(ValueError):
    """A brute-force computation was requested beyond its configured size cap."""


class BinningError(ValueError):
    """Histogram bin parameters are inconsistent."""


class InsufficientDataError(ValueError):
    """Not enough populated bins to perform a fit."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, value, error):
        super().__init__(message)
        self.value = value
        self.error = error


class ResidueError(ArithmeticError):
    """An expectation value that must be real carries an imaginary residue."""

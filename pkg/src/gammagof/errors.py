"""Exception types shared across the package."""


class GammagofError(Exception):
    """Base class for all package errors."""


class DomainError(GammagofError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class EstimationError(GammagofError, RuntimeError):
    """Parameter estimation failed (degenerate sample or non-convergence)."""


class NumericError(GammagofError, RuntimeError):
    """A numerical routine (quadrature, continued fraction, eigensolve) failed."""

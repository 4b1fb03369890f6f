"""Goodness-of-fit testing for the Gamma family.

A weighted L2-type test family built on a fixed-point characterization of the
Gamma law, with parametric bootstrap calibration, classical EDF competitors,
asymptotic null-law machinery, and a Monte Carlo power-study harness.
"""

from .errors import DomainError, EstimationError, GammagofError, NumericError

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "EstimationError",
    "GammagofError",
    "NumericError",
    "__version__",
]

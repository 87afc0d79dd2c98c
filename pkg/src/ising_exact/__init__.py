"""Exact and high-precision tools for two-dimensional Ising correlations and susceptibility."""

from .errors import IsingExactError
from .numerics import DEFAULT_PREC, PrecReal, ctx
from .params import CouplingPoint, Side, derive_variables
from .series import RationalSeries

__version__ = "0.1.0"

__all__ = ["IsingExactError", "DEFAULT_PREC", "PrecReal", "ctx", "CouplingPoint", "Side",
           "derive_variables", "RationalSeries", "__version__"]

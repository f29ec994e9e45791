"""Numerical toolkit for the noncommutative analytic Toeplitz algebra on truncated Fock space."""

from .words import EMPTY, FockVector, TruncatedFockSpace, enumerate_words, inner, reproject
from .freealg import LEFT, RIGHT, ConvergenceError, FreePoly, apply, cesaro, compose, op_norm
from .toeplitz import NotToeplitzError, ToeplitzSymbol, symbol_from_operator
from .factor import analytic_spectral_factor, factor_from_summands, verify_factorization
from .dual import FiniteRankFunctional, a1_iterate, dual_seminorm, extract_wandering, rank_one

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "FockVector",
    "TruncatedFockSpace",
    "enumerate_words",
    "inner",
    "reproject",
    "LEFT",
    "RIGHT",
    "ConvergenceError",
    "FreePoly",
    "apply",
    "cesaro",
    "compose",
    "op_norm",
    "NotToeplitzError",
    "ToeplitzSymbol",
    "symbol_from_operator",
    "analytic_spectral_factor",
    "factor_from_summands",
    "verify_factorization",
    "FiniteRankFunctional",
    "a1_iterate",
    "dual_seminorm",
    "extract_wandering",
    "rank_one",
]

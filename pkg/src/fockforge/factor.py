"""Factorizations ``T = B^* C`` of Toeplitz operators."""

from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.linalg as la

from .freealg import FreePoly, compose, product_compression
from .toeplitz import ToeplitzSymbol, series_side
from .words import TruncatedFockSpace, Word

POSITIVITY_TOL = 1e-10


def shift_word(i: int) -> Word:
    """``1^i 2``."""
    return (1,) * i + (2,)


def factor_from_summands(
    c: Sequence[complex], A: Sequence[FreePoly], n: int
) -> tuple[FreePoly, FreePoly]:
    """Combine ``T = sum c_i A_i^* A_i`` into ``B^* C``.

    ``B = sum S_{1^i 2} A_i`` and ``C = sum c_i S_{1^i 2} A_i``, with ``S``
    on the side of the ``A_i``.  The isometries ``S_{1^i 2}`` have pairwise
    orthogonal ranges, so all cross terms vanish.
    """
    if n < 2:
        raise ValueError("the combination step needs at least two letters")
    if not A or len(c) != len(A):
        raise ValueError("need equally many coefficients and summands")
    side = A[0].side
    B = FreePoly(side)
    C = FreePoly(side)
    for i, (ci, Ai) in enumerate(zip(c, A), start=1):
        term = compose(FreePoly.monomial(shift_word(i), side), Ai)
        B = B + term
        C = C + term * ci
    return B, C


def bounded_below_adjust(B: FreePoly, C: FreePoly, m: int) -> tuple[FreePoly, FreePoly]:
    """Add isometries of fresh orthogonal range: ``B + S_{1^{m+1}2}``, ``C + S_{1^{m+2}2}``."""
    side = B.side
    return (
        B + FreePoly.monomial(shift_word(m + 1), side),
        C + FreePoly.monomial(shift_word(m + 2), side),
    )


def _check_sides(s: ToeplitzSymbol, *polys: FreePoly):
    want = series_side(s.side)
    for p in polys:
        if p.side != want:
            raise ValueError(f"{s.side}-Toeplitz symbols factor through {want}-side polynomials")


def verify_factorization(
    s: ToeplitzSymbol, B: FreePoly, C: FreePoly, space: TruncatedFockSpace
) -> float:
    """Largest entry of ``T - B^* C`` on the depth-``d`` compression."""
    _check_sides(s, B, C)
    diff = s.matrix(space) - product_compression(B, C, space)
    return float(np.max(np.abs(diff.toarray()), initial=0.0))


def min_singular_value_guarded(p: FreePoly, space: TruncatedFockSpace) -> float:
    """Smallest singular value of ``p`` restricted to inputs of length ``<= d - deg(p)``."""
    g = space.guard(p.degree)
    if g == 0:
        raise ValueError("depth leaves no room for the guard band")
    cols = p.matrix(space)[:, :g].toarray()
    return float(np.linalg.svd(cols, compute_uv=False)[-1])


def _pattern_mask(space: TruncatedFockSpace, side: str) -> np.ndarray:
    """``mask[w, u]`` is True when ``w = v u`` (left) or ``w = u v`` (right)."""
    mask = np.zeros((space.dim, space.dim), dtype=bool)
    for v in space.words:
        src, dst = space.shift_indices(v, side)
        mask[dst, src] = True
    return mask


def analytic_spectral_factor(
    s: ToeplitzSymbol, space: TruncatedFockSpace, tol: float = POSITIVITY_TOL
) -> tuple[FreePoly, float, float]:
    """Experimental analytic factor ``A`` with ``A^* A ~ T`` via graded Cholesky.

    The compression is factored as ``T_d = G^* G`` with ``G`` lower triangular
    in length-lex order (Cholesky of the order-reversed matrix).  Entries of
    ``G`` outside the analytic pattern are measured as ``pattern_residual`` and
    discarded; ``A`` is read off the column of the empty word.
    ``factor_residual`` is the largest entry of ``T_d - P_d A^* A P_d``.
    """
    t = s.matrix(space).toarray()
    t = 0.5 * (t + t.conj().T)
    evals = np.linalg.eigvalsh(t)
    if evals[0] < tol * evals[-1] or evals[-1] <= 0:
        raise ValueError(
            f"compression is not positive definite (eigenvalues {evals[0]:.3e}..{evals[-1]:.3e})"
        )
    rev = t[::-1, ::-1]
    try:
        low = la.cholesky(rev, lower=True)
    except la.LinAlgError as exc:
        raise ValueError("Cholesky factorization failed") from exc
    g = low.conj().T[::-1, ::-1]
    side = series_side(s.side)
    mask = _pattern_mask(space, side)
    pattern_residual = float(np.max(np.abs(g[~mask]), initial=0.0))
    col = g[:, 0]
    A = FreePoly(side, {space.words[i]: col[i] for i in np.flatnonzero(np.abs(col) > 1e-15)})
    factor_residual = float(
        np.max(np.abs(t - product_compression(A, A, space).toarray()), initial=0.0)
    )
    return A, pattern_residual, factor_residual

"""Toeplitz symbols for the row isometries ``L`` and ``R``.

A symbol of side ``"R"`` describes an R-Toeplitz operator
``sum a_w L_w + sum conj(b_w) L_w^*``; a symbol of side ``"L"`` describes an
L-Toeplitz operator with the same series in ``R_w``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
import scipy.sparse as sp

from .freealg import (
    LEFT,
    RIGHT,
    FreePoly,
    OperatorLike,
    action_matrix,
    product_compression,
)
from .words import (
    EMPTY,
    FockVector,
    TruncatedFockSpace,
    Word,
    format_word,
    parse_word,
    strip_suffix,
)

TOEPLITZ_SIDES = ("L", "R")
SYMBOL_TOL = 1e-9


class NotToeplitzError(ValueError):
    pass


def series_side(side: str) -> str:
    """Side of the shifts appearing in the Fourier series of a ``side``-Toeplitz operator."""
    if side == "L":
        return RIGHT
    if side == "R":
        return LEFT
    raise ValueError(f"Toeplitz side must be 'L' or 'R', got {side!r}")


def toeplitz_side_for(poly_side: str) -> str:
    return "L" if poly_side == RIGHT else "R"


@dataclass(frozen=True)
class ToeplitzSymbol:
    side: str
    analytic: Mapping[Word, complex] = field(default_factory=dict)
    coanalytic: Mapping[Word, complex] = field(default_factory=dict)

    def __post_init__(self):
        series_side(self.side)
        a = {tuple(w): complex(c) for w, c in self.analytic.items() if complex(c) != 0}
        b = {tuple(w): complex(c) for w, c in self.coanalytic.items() if complex(c) != 0}
        if EMPTY in b:
            raise ValueError("co-analytic part has no constant term; put it in analytic[()]")
        object.__setattr__(self, "analytic", a)
        object.__setattr__(self, "coanalytic", b)

    @classmethod
    def identity(cls, side: str = "L") -> "ToeplitzSymbol":
        return cls(side, {EMPTY: 1.0})

    @property
    def constant(self) -> complex:
        return self.analytic.get(EMPTY, 0j)

    @property
    def degree(self) -> int:
        return max(
            [len(w) for w in self.analytic] + [len(w) for w in self.coanalytic], default=0
        )

    @property
    def max_letter(self) -> int:
        words = [w for w in itertools.chain(self.analytic, self.coanalytic) if w]
        return max((max(w) for w in words), default=0)

    def analytic_poly(self) -> FreePoly:
        return FreePoly(series_side(self.side), self.analytic)

    def coanalytic_poly(self) -> FreePoly:
        return FreePoly(series_side(self.side), self.coanalytic)

    def matrix(self, space: TruncatedFockSpace) -> sp.csr_matrix:
        a = self.analytic_poly().matrix(space)
        b = self.coanalytic_poly().matrix(space)
        return (a + b.conj().T).tocsr()

    def __sub__(self, other: "ToeplitzSymbol") -> "ToeplitzSymbol":
        if self.side != other.side:
            raise ValueError("side mismatch")
        a = dict(self.analytic)
        for w, c in other.analytic.items():
            a[w] = a.get(w, 0) - c
        b = dict(self.coanalytic)
        for w, c in other.coanalytic.items():
            b[w] = b.get(w, 0) - c
        return ToeplitzSymbol(self.side, a, b)

    def max_coeff_diff(self, other: "ToeplitzSymbol") -> float:
        d = self - other
        vals = [abs(c) for c in itertools.chain(d.analytic.values(), d.coanalytic.values())]
        return max(vals, default=0.0)

    def to_json(self, n: int) -> dict:
        def entries(m):
            return [
                {"word": format_word(w, n), "re": c.real, "im": c.imag}
                for w, c in sorted(m.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ]

        return {"side": self.side, "a": entries(self.analytic), "b": entries(self.coanalytic)}

    @classmethod
    def from_json(cls, data: Mapping, n: int) -> "ToeplitzSymbol":
        def read(entries):
            out: dict[Word, complex] = {}
            for e in entries:
                w = parse_word(e["word"], n)
                out[w] = out.get(w, 0) + complex(e.get("re", 0.0), e.get("im", 0.0))
            return out

        return cls(data["side"], read(data.get("a", [])), read(data.get("b", [])))


def apply_symbol(s: ToeplitzSymbol, x: FockVector) -> FockVector:
    if s.max_letter > x.space.n:
        raise ValueError(f"symbol uses letter {s.max_letter} but n = {x.space.n}")
    return FockVector(x.space, s.matrix(x.space) @ x.coeffs)


def toeplitz_residual(op: OperatorLike, side: str, space: TruncatedFockSpace) -> float:
    """Largest entry of ``S_i^* T S_j - delta_ij T`` on the guard band.

    ``side`` names the row isometry ``S`` (``"L"`` or ``"R"``).  Entries are
    compared on basis words of length ``<= d - 1``, where the truncated matrix
    of ``T`` supplies every entry needed exactly.
    """
    if space.depth < 1:
        raise ValueError("need depth >= 1")
    shift_side = LEFT if side == "L" else RIGHT if side == "R" else None
    if shift_side is None:
        raise ValueError(f"side must be 'L' or 'R', got {side!r}")
    m = action_matrix(op, space)
    g = space.guard(1)
    base = m[:g, :g]
    worst = 0.0
    images = [space.shift_indices((i,), shift_side)[1] for i in range(1, space.n + 1)]
    for i, img_i in enumerate(images):
        for j, img_j in enumerate(images):
            block = m[np.ix_(img_i, img_j)]
            if i == j:
                block = block - base
            worst = max(worst, float(np.max(np.abs(block))))
    return worst


def symbol_from_operator(
    op: OperatorLike,
    space: TruncatedFockSpace,
    side: str,
    tol: float = SYMBOL_TOL,
    atol: float = 0.0,
) -> ToeplitzSymbol:
    """Read the Fourier coefficients of a Toeplitz operator.

    ``a_w = (T xi_0, xi_w)`` and ``b_w = (T^* xi_0, xi_w)``.  Coefficients with
    modulus ``<= atol`` are dropped.
    """
    m = action_matrix(op, space)
    res = toeplitz_residual(m, side, space)
    if res >= tol:
        raise NotToeplitzError(f"operator is not {side}-Toeplitz: residual {res:.3e}")
    col = m[:, 0]
    row = np.conj(m[0, :])
    words = space.words
    a = {words[i]: col[i] for i in np.flatnonzero(np.abs(col) > atol)}
    b = {words[i]: row[i] for i in np.flatnonzero(np.abs(row) > atol) if i != 0}
    return ToeplitzSymbol(side, a, b)


def shortineq_sides(
    s: ToeplitzSymbol, u: Word, space: Optional[TruncatedFockSpace] = None
) -> tuple[float, float]:
    """Norms of the co-analytic part applied to ``xi_u`` adjointly and directly."""
    need = len(u) + s.degree
    if space is None:
        space = TruncatedFockSpace(max(s.max_letter, max(u, default=1), 1), need)
    if need > space.depth:
        raise ValueError(f"|u| + deg = {need} exceeds depth {space.depth}")
    bm = s.coanalytic_poly().matrix(space)
    e = np.zeros(space.dim, dtype=complex)
    e[space.index(u)] = 1.0
    lhs = float(np.linalg.norm(bm.conj().T @ e))
    rhs = float(np.linalg.norm(bm @ e))
    return lhs, rhs


def _conjugated_word(w: Word, v: Word) -> Optional[Word]:
    # R_v^* R_w R_v = R_y when v w = y v, and 0 otherwise
    return strip_suffix(v, v + w)


def conjugate_by_word(s: ToeplitzSymbol, v: Word) -> ToeplitzSymbol:
    """Symbol of ``R_v^* T R_v`` for an L-Toeplitz ``T``."""
    if s.side != "L":
        raise ValueError("word conjugation is defined for L-Toeplitz symbols")
    v = tuple(v)
    a: dict[Word, complex] = {}
    b: dict[Word, complex] = {}
    for w, c in s.analytic.items():
        y = _conjugated_word(w, v)
        if y is not None:
            a[y] = a.get(y, 0) + c
    for w, c in s.coanalytic.items():
        y = _conjugated_word(w, v)
        if y is not None:
            b[y] = b.get(y, 0) + c
    return ToeplitzSymbol("L", a, b)


def flattening_error(s: ToeplitzSymbol, v: Word, p: int, n: int) -> float:
    """``max_{|u| <= p} || R_v^* T R_v xi_u - a_0 xi_u ||``."""
    conj = conjugate_by_word(s, v)
    rest = conj - ToeplitzSymbol("L", {EMPTY: s.constant})
    if not rest.analytic and not rest.coanalytic:
        return 0.0
    space = TruncatedFockSpace(n, p + rest.degree)
    cols = rest.matrix(space)[:, : space.guard(rest.degree)]
    return float(np.max(np.sqrt(np.asarray(abs(cols).power(2).sum(axis=0)))))


def witness_word(k: int) -> Word:
    """The word ``1 2^k``."""
    return (1,) + (2,) * k


def flattening_word(s: ToeplitzSymbol, p: int, eps: float, n: int) -> Word:
    """First word among ``(), 12, 122, ...`` flattening ``s`` to ``a_0`` on words of length <= p."""
    if n < 2:
        raise ValueError("flattening words need at least two letters")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if s.side != "L":
        raise ValueError("flattening is defined for L-Toeplitz symbols")
    if flattening_error(s, EMPTY, p, n) < eps:
        return EMPTY
    k = 1
    while True:
        v = witness_word(k)
        if flattening_error(s, v, p, n) < eps:
            return v
        k += 1


def gram_symbol(x_op: FreePoly, space: TruncatedFockSpace, tol: float = SYMBOL_TOL) -> ToeplitzSymbol:
    """Symbol of ``X^* X`` for a right multiplier ``X``; it is L-Toeplitz."""
    if x_op.side != RIGHT:
        raise ValueError("gram_symbol expects a right-side polynomial")
    m = product_compression(x_op, x_op, space)
    return symbol_from_operator(m, space, "L", tol=tol, atol=1e-14)

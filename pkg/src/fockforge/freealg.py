"""Fourier polynomials in the left and right regular representations.

A :class:`FreePoly` is a finitely supported sum ``sum_w a_w L_w`` (side
``"left"``) or ``sum_w a_w R_w`` (side ``"right"``).  Acting on a truncated
Fock space it is the compression ``P_d A P_d``: image words longer than the
depth are dropped.  Adjoints are compressions as well, and since the
truncation is co-invariant for analytic operators, the matrix of the adjoint
is the conjugate transpose of the matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Union

import numpy as np
import scipy.sparse as sp

from .words import (
    EMPTY,
    FockVector,
    TruncatedFockSpace,
    Word,
    format_word,
    parse_word,
    reproject,
)

log = logging.getLogger(__name__)

LEFT = "left"
RIGHT = "right"
SIDES = (LEFT, RIGHT)

Action = Callable[[FockVector], FockVector]
OperatorLike = Union[Action, np.ndarray, sp.spmatrix, sp.sparray]


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class FreePoly:
    """Analytic element ``sum_w a_w S_w`` with ``S = L`` or ``S = R``."""

    side: str
    coeffs: Mapping[Word, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}, got {self.side!r}")
        clean: dict[Word, complex] = {}
        for w, a in self.coeffs.items():
            a = complex(a)
            if a != 0:
                clean[tuple(int(x) for x in w)] = a
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def identity(cls, side: str = LEFT) -> "FreePoly":
        return cls(side, {EMPTY: 1.0})

    @classmethod
    def monomial(cls, word: Iterable[int], side: str = LEFT, coeff: complex = 1.0) -> "FreePoly":
        return cls(side, {tuple(word): coeff})

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.coeffs), default=0)

    @property
    def max_letter(self) -> int:
        return max((max(w) for w in self.coeffs if w), default=0)

    def __add__(self, other: "FreePoly") -> "FreePoly":
        _same_side(self, other)
        out = dict(self.coeffs)
        for w, a in other.coeffs.items():
            out[w] = out.get(w, 0) + a
        return FreePoly(self.side, out)

    def __neg__(self) -> "FreePoly":
        return FreePoly(self.side, {w: -a for w, a in self.coeffs.items()})

    def __sub__(self, other: "FreePoly") -> "FreePoly":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "FreePoly":
        return FreePoly(self.side, {w: a * scalar for w, a in self.coeffs.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "FreePoly") -> "FreePoly":
        return compose(self, other)

    def matrix(self, space: TruncatedFockSpace) -> sp.csr_matrix:
        return poly_matrix(self, space)

    def to_json(self, n: int) -> dict:
        return {
            "side": self.side,
            "coeffs": [
                {"word": format_word(w, n), "re": a.real, "im": a.imag}
                for w, a in sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping, n: int) -> "FreePoly":
        coeffs: dict[Word, complex] = {}
        for entry in data.get("coeffs", []):
            w = parse_word(entry["word"], n)
            coeffs[w] = coeffs.get(w, 0) + complex(entry.get("re", 0.0), entry.get("im", 0.0))
        return cls(data["side"], coeffs)


def _same_side(p: FreePoly, q: FreePoly):
    if p.side != q.side:
        raise ValueError(f"side mismatch: {p.side} vs {q.side}")


def _check_alphabet(p: FreePoly, space: TruncatedFockSpace):
    if p.max_letter > space.n:
        raise ValueError(f"polynomial uses letter {p.max_letter} but n = {space.n}")


def poly_matrix(p: FreePoly, space: TruncatedFockSpace) -> sp.csr_matrix:
    """Sparse matrix of the compression ``P_d p P_d``."""
    _check_alphabet(p, space)
    rows, cols, data = [], [], []
    for w, a in p.coeffs.items():
        src, dst = space.shift_indices(w, p.side)
        rows.append(dst)
        cols.append(src)
        data.append(np.full(src.shape, a, dtype=complex))
    if not rows:
        return sp.csr_matrix((space.dim, space.dim), dtype=complex)
    m = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(space.dim, space.dim),
    )
    return m.tocsr()


def apply(p: FreePoly, x: FockVector) -> FockVector:
    return FockVector(x.space, poly_matrix(p, x.space) @ x.coeffs)


def apply_adjoint(p: FreePoly, x: FockVector) -> FockVector:
    return FockVector(x.space, poly_matrix(p, x.space).conj().T @ x.coeffs)


def compose(p: FreePoly, q: FreePoly) -> FreePoly:
    """Operator product ``p q``.

    ``L_u L_v = L_{uv}`` while ``R_u R_v = R_{vu}``.
    """
    _same_side(p, q)
    out: dict[Word, complex] = {}
    for u, a in p.coeffs.items():
        for v, b in q.coeffs.items():
            w = u + v if p.side == LEFT else v + u
            out[w] = out.get(w, 0) + a * b
    return FreePoly(p.side, out)


def cesaro(p: FreePoly, k: int) -> FreePoly:
    """k-th Cesaro mean ``sum_{|w|<k} (1 - |w|/k) a_w S_w``."""
    if k < 1:
        raise ValueError("Cesaro index must be >= 1")
    return FreePoly(
        p.side, {w: (1 - len(w) / k) * a for w, a in p.coeffs.items() if len(w) < k}
    )


def as_action(op: OperatorLike, space: TruncatedFockSpace) -> Action:
    if callable(op) and not isinstance(op, (np.ndarray, sp.spmatrix)) and not sp.issparse(op):
        return op
    return lambda x: FockVector(space, op @ x.coeffs)


def action_matrix(op: OperatorLike, space: TruncatedFockSpace) -> np.ndarray:
    """Dense matrix of an operator given as an action, dense or sparse matrix."""
    if sp.issparse(op):
        return op.toarray()
    if isinstance(op, np.ndarray):
        if op.shape != (space.dim, space.dim):
            raise ValueError(f"matrix shape {op.shape} does not match dim {space.dim}")
        return op
    cols = [op(space.basis(w)).coeffs for w in space.words]
    return np.column_stack(cols)


def fourier_coefficient(op: OperatorLike, w: Word, space: TruncatedFockSpace) -> complex:
    """``(A xi_empty, xi_w)``."""
    if len(w) > space.depth:
        raise ValueError(f"|w| = {len(w)} exceeds depth {space.depth}")
    image = as_action(op, space)(space.basis(EMPTY))
    return image[w]


def product_compression(
    b: Optional[FreePoly], c: FreePoly, space: TruncatedFockSpace
) -> sp.csr_matrix:
    """Exact compression ``P_d b^* c P_d`` (``b=None`` means the identity).

    The product is formed on a lifted space deep enough that neither factor
    loses mass, then cut back to depth ``d``.
    """
    deg = max(c.degree, b.degree if b is not None else 0)
    lifted = space.with_depth(space.depth + deg)
    k = space.dim
    cm = poly_matrix(c, lifted)[:, :k]
    if b is None:
        return sp.csr_matrix(cm[:k, :])
    return sp.csr_matrix(poly_matrix(b, lifted)[:, :k].conj().T @ cm)


def _random_start(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def matrix_norm(
    m,
    tol: float = 1e-10,
    *,
    max_iter: int = 10_000,
    seed: int = 0,
) -> float:
    """Largest singular value of a (sparse) matrix by power iteration on ``M^* M``.

    Stops once the Rayleigh quotient changes by less than ``tol`` relative;
    every iterate is a lower bound for the true value.
    """
    a = sp.csr_matrix(m)
    ah = a.conj().T.tocsr()
    v = _random_start(a.shape[1], seed)
    lam = 0.0
    for it in range(1, max_iter + 1):
        w = ah @ (a @ v)
        new = float(np.vdot(v, w).real)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
        if abs(new - lam) <= tol * abs(new):
            log.debug("power iteration converged after %d steps", it)
            return float(np.sqrt(new))
        lam = new
    raise ConvergenceError(f"power iteration did not reach tol={tol} in {max_iter} steps")


def op_norm(
    p: FreePoly,
    space: TruncatedFockSpace,
    tol: float = 1e-10,
    *,
    max_iter: int = 10_000,
    seed: int = 0,
) -> float:
    """Largest singular value of the compression of ``p``.

    This underestimates the true norm, and the compression norm is itself
    a lower bound that grows with the depth.
    """
    if space.depth < p.degree:
        raise ValueError("depth must be >= degree of the polynomial")
    return matrix_norm(poly_matrix(p, space), tol, max_iter=max_iter, seed=seed)


def is_isometry(p: FreePoly, space: TruncatedFockSpace, tol: float = 1e-10) -> tuple[bool, float]:
    """Check that ``p`` preserves norms and inner products of basis vectors.

    Only basis words with ``|u| <= d - deg(p)`` are used, so no image is
    truncated.  The residual is the worst of ``| ||p xi_u|| - 1 |`` and
    ``|(p xi_u, p xi_v)|`` for ``u != v``.
    """
    g = space.guard(p.degree)
    if g == 0:
        raise ValueError("depth leaves no room for the guard band")
    cols = poly_matrix(p, space)[:, :g]
    gram = (cols.conj().T @ cols).tocoo()
    diag = np.sqrt(np.abs(gram.diagonal()))
    offdiag = np.abs(gram.data[gram.row != gram.col])
    residual = max(float(np.max(np.abs(diag - 1.0))), float(np.max(offdiag, initial=0.0)))
    return residual < tol, residual


def is_wandering(x: FockVector, depth_limit: int, tol: float = 1e-10) -> tuple[bool, float]:
    """Gram test of ``{L_w x : |w| <= depth_limit}`` against the identity.

    The shifts are taken in a space deep enough to hold them without loss.
    """
    if depth_limit < 0:
        raise ValueError("depth_limit must be >= 0")
    if depth_limit > x.space.depth:
        raise ValueError(
            f"depth_limit {depth_limit} exceeds the truncation depth {x.space.depth} of x"
        )
    supp = max(x.support_depth(), 0)
    lifted = reproject(x, supp + depth_limit)
    space = lifted.space
    words = space.words[: space.guard(supp)]
    vecs = []
    for w in words:
        src, dst = space.shift_indices(w, LEFT)
        col = np.zeros(space.dim, dtype=complex)
        col[dst] = lifted.coeffs[src]
        vecs.append(col)
    m = np.column_stack(vecs)
    gram = m.conj().T @ m
    deviation = float(np.max(np.abs(gram - np.eye(len(words)))))
    return deviation < tol, deviation


def generator(i: int, side: str = LEFT) -> FreePoly:
    return FreePoly.monomial((i,), side)


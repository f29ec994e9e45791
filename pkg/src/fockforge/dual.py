"""Finite-rank functionals on the analytic Toeplitz algebra and the
rank-one approximation scheme that produces wandering vectors.

Everything here lives in the concrete model where the free semigroup algebra
is ``L_n`` itself.  The wandering subspaces used by the iteration are
``L_n[xi_{1 2^r}]``: vectors supported on words ending in ``1 2^r``.  For
distinct ``r`` these subspaces are invariant and mutually orthogonal, so the
quasi-orthogonality terms of the scheme are exactly zero.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .freealg import LEFT, RIGHT, FreePoly, apply
from .toeplitz import witness_word
from .words import FockVector, TruncatedFockSpace, Word, reproject

log = logging.getLogger(__name__)

ASCENT_RESTARTS = 64
ASCENT_RTOL = 1e-9
SCHEDULE_MARGIN = 0.9
DENSE_LIMIT = 128
MIN_STEP = 1e-6


def worker_count() -> int:
    """Worker cap from ``FOCKFORGE_THREADS`` (0 or unset means automatic)."""
    try:
        n = int(os.environ.get("FOCKFORGE_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class FiniteRankFunctional:
    """``A -> sum_i (A x_i, y_i)``."""

    pairs: tuple[tuple[FockVector, FockVector], ...]

    def __post_init__(self):
        pairs = tuple((x, y) for x, y in self.pairs)
        spaces = {v.space for pair in pairs for v in pair}
        if len(spaces) > 1:
            raise ValueError("all vectors of a functional must share one space")
        object.__setattr__(self, "pairs", pairs)

    @property
    def space(self) -> Optional[TruncatedFockSpace]:
        return self.pairs[0][0].space if self.pairs else None

    def __add__(self, other: "FiniteRankFunctional") -> "FiniteRankFunctional":
        return FiniteRankFunctional(self.pairs + other.pairs)

    def __neg__(self) -> "FiniteRankFunctional":
        return FiniteRankFunctional(tuple((-x, y) for x, y in self.pairs))

    def __sub__(self, other: "FiniteRankFunctional") -> "FiniteRankFunctional":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "FiniteRankFunctional":
        return FiniteRankFunctional(tuple((x * scalar, y) for x, y in self.pairs))

    __rmul__ = __mul__

    def __call__(self, p: FreePoly) -> complex:
        return evaluate(self, p)

    def support_depth(self) -> int:
        return max((max(x.support_depth(), y.support_depth()) for x, y in self.pairs), default=-1)

    def cs_cap(self) -> float:
        """Cauchy-Schwarz upper bound ``sum ||x_i|| ||y_i||`` of the norm."""
        return float(sum(x.norm() * y.norm() for x, y in self.pairs))

    def reproject(self, depth: int) -> "FiniteRankFunctional":
        return FiniteRankFunctional(
            tuple((reproject(x, depth), reproject(y, depth)) for x, y in self.pairs)
        )

    def to_json(self) -> dict:
        return {"pairs": [{"x": x.to_json(), "y": y.to_json()} for x, y in self.pairs]}

    @classmethod
    def from_json(cls, data: dict, space: TruncatedFockSpace) -> "FiniteRankFunctional":
        return cls(
            tuple(
                (FockVector.from_json(space, p["x"]), FockVector.from_json(space, p["y"]))
                for p in data["pairs"]
            )
        )


def rank_one(x: FockVector, y: FockVector) -> FiniteRankFunctional:
    return FiniteRankFunctional(((x, y),))


def evaluate(f: FiniteRankFunctional, p: FreePoly) -> complex:
    """``sum_i (p x_i, y_i)``.

    Exact for every degree: ``y_i`` lies in the truncation, so
    ``(P_d p x, y) = (p x, y)``.
    """
    if p.side != LEFT:
        raise ValueError("functionals act on left-side polynomials")
    total = 0j
    for x, y in f.pairs:
        total += complex(np.vdot(y.coeffs, apply(p, x).coeffs))
    return total


def moments(f: FiniteRankFunctional, max_len: int, n: Optional[int] = None) -> np.ndarray:
    """Values ``f(L_w)`` for all words ``|w| <= max_len`` in length-lex order."""
    if not f.pairs:
        if n is None:
            raise ValueError("empty functional needs an explicit alphabet size")
        return np.zeros(TruncatedFockSpace(n, max_len).dim, dtype=complex)
    space = f.space
    words = TruncatedFockSpace(space.n, max_len).words
    out = np.zeros(len(words), dtype=complex)
    for k, w in enumerate(words):
        if len(w) > space.depth:
            continue
        src, dst = space.shift_indices(w, LEFT)
        for x, y in f.pairs:
            out[k] += np.vdot(y.coeffs[dst], x.coeffs[src])
    return out


class _PolyFamily:
    """Sparse matrices ``sum_w a_w L_w`` for a fixed set of words."""

    def __init__(self, words: Sequence[Word], space: TruncatedFockSpace):
        rows, cols, owner = [], [], []
        for k, w in enumerate(words):
            src, dst = space.shift_indices(w, LEFT)
            rows.append(dst)
            cols.append(src)
            owner.append(np.full(src.shape, k))
        self.rows = np.concatenate(rows)
        self.cols = np.concatenate(cols)
        self.owner = np.concatenate(owner)
        self.dim = space.dim
        self.m = len(words)

    def matrix(self, a: np.ndarray) -> sp.csr_matrix:
        return sp.csr_matrix(
            (a[self.owner], (self.rows, self.cols)), shape=(self.dim, self.dim)
        )

    def dense(self, a: np.ndarray) -> np.ndarray:
        flat = self.rows * self.dim + self.cols
        w = a[self.owner]
        size = self.dim * self.dim
        re = np.bincount(flat, weights=w.real, minlength=size)
        im = np.bincount(flat, weights=w.imag, minlength=size)
        return (re + 1j * im).reshape(self.dim, self.dim)

    def top_singular(self, a: np.ndarray, v0: Optional[np.ndarray]):
        if self.dim <= DENSE_LIMIT:
            u, s, vh = np.linalg.svd(self.dense(a))
            return s[0], u[:, 0], vh[0].conj()
        mat = self.matrix(a)
        try:
            u, s, vh = spla.svds(
                mat, k=1, v0=v0, tol=1e-10, ncv=min(self.dim - 1, 24), random_state=0
            )
            return s[0], u[:, 0], vh[0].conj()
        except spla.ArpackError:
            return _power_top(mat, v0)

    def sigma_gradient(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        # c_w = u^H L_w v; the ascent direction for sigma is conj(c)
        prod = np.conj(u[self.rows]) * v[self.cols]
        re = np.bincount(self.owner, weights=prod.real, minlength=self.m)
        im = np.bincount(self.owner, weights=prod.imag, minlength=self.m)
        return re - 1j * im


def _power_top(mat: sp.csr_matrix, v0: Optional[np.ndarray], tol: float = 1e-12, max_iter: int = 10_000):
    """Top singular triple by power iteration on ``M^* M`` (ARPACK fallback)."""
    mh = mat.conj().T.tocsr()
    v = v0 if v0 is not None else np.ones(mat.shape[1], dtype=complex)
    v = v / np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = mh @ (mat @ v)
        new = float(np.vdot(v, w).real)
        nw = np.linalg.norm(w)
        if nw == 0:
            break
        v = w / nw
        if abs(new - lam) <= tol * abs(new):
            break
        lam = new
    mv = mat @ v
    sigma = float(np.linalg.norm(mv))
    u = mv / sigma if sigma > 0 else mv
    return sigma, u, v


def _ascent(
    family: _PolyFamily, g: np.ndarray, a0: np.ndarray, max_steps: int = 300
) -> float:
    """Normalized gradient ascent of ``|<a, g>| / ||A_a||`` with step halving."""

    def objective(a, v0=None):
        sigma, u, v = family.top_singular(a, v0)
        s = np.dot(a, g)
        return abs(s) / sigma, sigma, s, u, v

    a = a0 / np.linalg.norm(a0)
    phi, sigma, s, u, v = objective(a)
    step = 0.5
    for _ in range(max_steps):
        if abs(s) == 0:
            grad = np.conj(g)
        else:
            grad_num = s * np.conj(g) / abs(s)
            grad = grad_num / sigma - abs(s) * family.sigma_gradient(u, v) / sigma**2
        gn = np.linalg.norm(grad)
        if gn == 0:
            break
        trial = a + step * grad / gn
        trial /= np.linalg.norm(trial)
        t_phi, t_sigma, t_s, t_u, t_v = objective(trial, v)
        if t_phi > phi:
            improvement = (t_phi - phi) / phi if phi > 0 else math.inf
            a, phi, sigma, s, u, v = trial, t_phi, t_sigma, t_s, t_u, t_v
            step = min(step * 1.5, 1.0)
            if improvement < ASCENT_RTOL:
                break
        else:
            step *= 0.5
            if step < MIN_STEP:
                break
    # inflate sigma by a few ulps so the value stays a lower bound of the supremum
    return abs(s) / (sigma * (1 + 1e-12))


def dual_seminorm(
    f: FiniteRankFunctional,
    poly_deg: int,
    norm_depth: Optional[int] = None,
    restarts: int = ASCENT_RESTARTS,
    seed: int = 0,
    n: Optional[int] = None,
) -> float:
    """Lower estimate of ``sup |f(A)|`` over ``deg A <= poly_deg`` with ``||P A P|| <= 1``.

    ``restarts=0`` skips the ascent and returns the monomial baseline.
    Otherwise the starts are the best monomial (so the result never drops below the baseline
    ``max_w |f(L_w)|``), the coefficient vector aligned with ``f``, then
    seeded random vectors.
    """
    if f.pairs:
        n = f.space.n
        supp = max(f.support_depth(), 0)
    elif n is None:
        return 0.0
    else:
        supp = 0
    if norm_depth is None:
        norm_depth = poly_deg + supp
    if norm_depth < poly_deg + supp:
        raise ValueError("norm_depth must be >= poly_deg + support depth of the functional")
    g = moments(f, poly_deg, n)
    if not np.any(g):
        return 0.0
    baseline = float(np.max(np.abs(g)))
    if restarts <= 0:
        return baseline
    space = TruncatedFockSpace(n, norm_depth)
    family = _PolyFamily(TruncatedFockSpace(n, poly_deg).words, space)

    def start(k: int) -> np.ndarray:
        if k == 0:
            a = np.zeros(g.size, dtype=complex)
            a[int(np.argmax(np.abs(g)))] = 1.0
            return a
        if k == 1:
            return np.conj(g)
        rng = np.random.default_rng([seed, k])
        return rng.standard_normal(g.size) + 1j * rng.standard_normal(g.size)

    workers = min(worker_count(), restarts)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(lambda k: _ascent(family, g, start(k)), range(restarts)))
    else:
        values = [_ascent(family, g, start(k)) for k in range(restarts)]
    best = max(values)
    if best <= baseline * (1 + 1e-9):
        log.info("dual_seminorm: ascent made no progress beyond the monomial baseline")
    return max(best, baseline)


def poly_from_vector(xi: FockVector, p: int) -> FreePoly:
    """Polynomial ``C`` with ``C xi_0 = P_p xi``."""
    if p > xi.space.depth:
        raise ValueError("p exceeds the truncation depth")
    k = xi.space.guard(xi.space.depth - p)
    words = xi.space.words
    return FreePoly(LEFT, {words[i]: xi.coeffs[i] for i in np.flatnonzero(xi.coeffs[:k])})


def tail_norm(xi: FockVector, p: int) -> float:
    k = xi.space.guard(xi.space.depth - p) if p <= xi.space.depth else xi.space.dim
    return float(np.linalg.norm(xi.coeffs[k:]))


def fresh_wandering(r: int, space: TruncatedFockSpace) -> FockVector:
    """``xi_{1 2^r}``, generating the r-th wandering subspace."""
    v = witness_word(r)
    if len(v) > space.depth:
        raise ValueError(f"|1 2^{r}| = {len(v)} exceeds depth {space.depth}")
    return space.basis(v)


def wandering_index(w: Word) -> Optional[int]:
    """``r`` when ``w`` ends in exactly ``1 2^r`` (r >= 1), else None."""
    k = 0
    i = len(w) - 1
    while i >= 0 and w[i] == 2:
        k += 1
        i -= 1
    if k >= 1 and i >= 0 and w[i] == 1:
        return k
    return None


def inner_eps(eps: float) -> float:
    """Largest ``e`` with ``2e + 3e^2 <= eps/2`` and ``4e + 4e^2 <= eps + eps^2/2``, times the margin."""
    e1 = (-2 + math.sqrt(4 + 6 * eps)) / 6
    e2 = (-4 + math.sqrt(16 + 16 * (eps + eps * eps / 2))) / 8
    return SCHEDULE_MARGIN * min(e1, e2)


def balance(xi: FockVector, eta: FockVector) -> tuple[FockVector, FockVector]:
    """Rescale ``(t xi, eta / t)`` with ``t > 0`` so both norms agree."""
    nx, ny = xi.norm(), eta.norm()
    if nx == 0 or ny == 0:
        return xi * 0, eta * 0
    t = math.sqrt(ny / nx)
    return xi * t, eta / t


def _rank_one_seminorm(x: FockVector, h: FockVector, poly_deg: int, restarts: int, seed: int) -> float:
    # exact zeros are read off the moments before any ascent
    f = rank_one(x, h)
    if not np.any(moments(f, poly_deg)):
        return 0.0
    return dual_seminorm(f, poly_deg, restarts=restarts, seed=seed)


@dataclass
class StepReport:
    p: int
    r: int
    eps: float
    eps_inner: float
    met: bool
    tail_x: float
    tail_y: float
    error_cap: float
    error_seminorm: float
    transfer_defect: float
    norm_x: float
    norm_y: float
    norm_target: float
    quasi_orth: list[float] = field(default_factory=list)


def approx_step(
    f: FiniteRankFunctional,
    h: Sequence[FockVector],
    eps: float,
    p: int,
    r: int,
    space: TruncatedFockSpace,
    *,
    strict: bool = True,
    seminorm_deg: int = 2,
    restarts: int = 2,
    seed: int = 0,
) -> tuple[FockVector, FockVector, StepReport]:
    """One rank-one approximation of ``f = [xi (x) eta]`` inside the r-th wandering subspace.

    ``x = C z`` and ``y = D z`` with ``C xi_0 = P_p xi``, ``D xi_0 = P_p eta`` and
    ``z = xi_{1 2^r}``.  Because ``R_{1 2^r}`` commutes with ``L_n``,
    ``[x (x) y] = [P_p xi (x) P_p eta]`` exactly, so the error functional is
    ``[xi (x) (eta - P_p eta)] + [(xi - P_p xi) (x) P_p eta]``.
    """
    if len(f.pairs) != 1:
        raise ValueError("approx_step expects a rank-one functional")
    if space.n < 2:
        raise ValueError("need n >= 2")
    z = fresh_wandering(r, space)
    if p + r + 1 > space.depth:
        raise ValueError(f"p + |1 2^{r}| = {p + r + 1} exceeds depth {space.depth}")
    xi, eta = balance(*f.pairs[0])
    scale = xi.norm() ** 2
    e_in = inner_eps(eps / scale) if scale > 0 else math.inf
    tx, ty = tail_norm(xi, p), tail_norm(eta, p)
    met = scale == 0 or (tx < e_in * math.sqrt(scale) and ty < e_in * math.sqrt(scale))
    if strict and not met:
        raise ValueError(
            f"p = {p} leaves tails ({tx:.3e}, {ty:.3e}) above {e_in * math.sqrt(scale):.3e}"
        )
    C = poly_from_vector(xi, p)
    D = poly_from_vector(eta, p)
    x = apply(C, reproject(z, space.depth))
    y = apply(D, z)

    head_x = xi.space.vector(C.coeffs)
    head_y = eta.space.vector(D.coeffs)
    error = rank_one(xi, eta) - rank_one(head_x, head_y)
    cap = xi.norm() * tail_norm(eta, p) + tail_norm(xi, p) * head_y.norm()
    sem = dual_seminorm(error, seminorm_deg, restarts=restarts, seed=seed) if cap > 0 else 0.0

    # transferred functional should match [P xi (x) P eta] on every monomial
    reach = max(head_y.support_depth(), 0)
    mom_concrete = moments(rank_one(x, y), reach)
    mom_model = moments(rank_one(head_x, head_y), reach, xi.space.n)
    transfer = float(np.max(np.abs(mom_concrete - mom_model), initial=0.0))

    qo = []
    for k, hv in enumerate(h):
        qo.append(_rank_one_seminorm(x, hv, seminorm_deg, restarts, seed + k))
        qo.append(_rank_one_seminorm(hv, y, seminorm_deg, restarts, seed + k))
    report = StepReport(
        p=p,
        r=r,
        eps=eps,
        eps_inner=e_in,
        met=bool(met),
        tail_x=tx,
        tail_y=ty,
        error_cap=cap,
        error_seminorm=sem,
        transfer_defect=transfer,
        norm_x=x.norm(),
        norm_y=y.norm(),
        norm_target=scale,
        quasi_orth=qo,
    )
    return x, y, report


def combine_witness(
    pairs: Sequence[tuple[FockVector, FockVector]], depth: Optional[int] = None
) -> tuple[FockVector, FockVector]:
    """A single balanced rank-one witness for ``sum [a_i (x) b_i]``.

    Summand ``i`` is moved by ``R_{w_i}`` for distinct words ``w_i`` of a
    common length, so the pieces have orthogonal invariant ranges and the cross
    terms vanish; ``||xi|| ||eta|| = sum ||a_i|| ||b_i||``.
    """
    pairs = [balance(a, b) for a, b in pairs]
    pairs = [(a, b) for a, b in pairs if a.norm() > 0]
    if not pairs:
        raise ValueError("no nonzero summands")
    space = pairs[0][0].space
    if len(pairs) == 1:
        return pairs[0]
    n = space.n
    length = 1
    while n**length < len(pairs):
        length += 1
    words = TruncatedFockSpace(n, length).words[-(n**length):][: len(pairs)]
    supp = max(max(a.support_depth(), b.support_depth()) for a, b in pairs)
    target = max(depth or 0, supp + length)
    out = TruncatedFockSpace(n, target)
    xi = np.zeros(out.dim, dtype=complex)
    eta = np.zeros(out.dim, dtype=complex)
    for w, (a, b) in zip(words, pairs):
        a2, b2 = reproject(a, target), reproject(b, target)
        src, dst = out.shift_indices(w, RIGHT)
        xi[dst] += a2.coeffs[src]
        eta[dst] += b2.coeffs[src]
    return FockVector(out, xi), FockVector(out, eta)


def _witness_from_functional(f: FiniteRankFunctional) -> tuple[FockVector, FockVector]:
    return combine_witness(list(f.pairs))


def a1_iterate(
    f: FiniteRankFunctional,
    alpha: float,
    K: int,
    space: TruncatedFockSpace,
    p: Optional[int] = None,
    *,
    seminorm_deg: int = 2,
    restarts: int = 0,
    seed: int = 0,
) -> tuple[FockVector, FockVector, list[dict]]:
    """Iterate rank-one approximations with fresh wandering subspaces ``r = 1..K``.

    Step ``k`` asks for error below ``0.9 min(alpha, alpha^(2k)/3)``.  With
    ``p=None`` the smallest sufficient ``p`` is used, capped by the depth
    (``p + k + 1 <= d``); a cap that misses the target is reported as slack.
    Errors are tracked through an explicit rank-one witness of
    ``f - [x_k (x) y_k]``, whose Cauchy-Schwarz product is a certified upper bound.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if space.n < 2:
        raise ValueError("need n >= 2")
    if K + 1 > space.depth:
        raise ValueError(f"K = {K} exhausts depth {space.depth}: needs |1 2^K| <= d")
    if p is not None and p + K + 1 > space.depth:
        raise ValueError(f"p + |1 2^K| = {p + K + 1} exceeds depth {space.depth}")
    target = f.reproject(space.depth) if f.space != space else f
    xi, eta = _witness_from_functional(f)
    x = space.zero()
    y = space.zero()
    trace: list[dict] = []
    for k in range(1, K + 1):
        eps = SCHEDULE_MARGIN * min(alpha, alpha ** (2 * k) / 3)
        cap_p = space.depth - (k + 1)
        if xi.norm() == 0:
            chosen = 0
        elif p is not None:
            chosen = p
        else:
            scale = xi.norm() ** 2
            bound = inner_eps(eps / scale) * math.sqrt(scale)
            chosen = cap_p
            for q in range(0, cap_p + 1):
                if tail_norm(xi, q) < bound and tail_norm(eta, q) < bound:
                    chosen = q
                    break
        if xi.norm() == 0:
            dx = space.zero()
            dy = space.zero()
            report = None
            new_pairs = []
        else:
            dx, dy, report = approx_step(
                rank_one(xi, eta),
                [x, y] if k > 1 else [],
                eps,
                chosen,
                k,
                space,
                strict=False,
                seminorm_deg=seminorm_deg,
                restarts=restarts,
                seed=seed + k,
            )
            head_x = xi.space.vector(poly_from_vector(xi, chosen).coeffs)
            head_y = eta.space.vector(poly_from_vector(eta, chosen).coeffs)
            new_pairs = [(xi, eta - head_y), (xi - head_x, head_y)]
            new_pairs = [(a, b) for a, b in new_pairs if a.norm() > 0 and b.norm() > 0]
        x_prev, y_prev = x, y
        x, y = x + dx, y + dy
        if new_pairs:
            xi, eta = combine_witness(new_pairs)
        else:
            xi, eta = xi * 0, eta * 0
        e_upper = xi.norm() * eta.norm()
        residual_w = rank_one(xi, eta)
        if e_upper > 0:
            e_lower = dual_seminorm(residual_w, seminorm_deg, restarts=restarts, seed=seed + 100 + k)
        else:
            e_lower = 0.0
        # witness must reproduce f - [x_k (x) y_k] on every monomial that can see it
        reach = max(target.support_depth(), y.support_depth(), eta.support_depth(), 0)
        lhs = moments(target, reach) - moments(rank_one(x, y), reach)
        rhs = moments(residual_w, reach, space.n) if e_upper > 0 else np.zeros_like(lhs)
        defect = float(np.max(np.abs(lhs - rhs), initial=0.0))
        row = {
            "k": k,
            "r": k,
            "p": int(chosen),
            "eps": eps,
            "bound": alpha ** (2 * k),
            "e_upper": e_upper,
            "e_lower": e_lower,
            "slack": max(0.0, e_upper - alpha ** (2 * k)),
            "norm_x": x.norm(),
            "norm_y": y.norm(),
            "incr_x": (x - x_prev).norm(),
            "incr_y": (y - y_prev).norm(),
            "quasi_orth": max(report.quasi_orth, default=0.0) if report else 0.0,
            "transfer_defect": report.transfer_defect if report else 0.0,
            "witness_defect": defect,
        }
        trace.append(row)
    return x, y, trace


def extract_wandering(
    x: FockVector,
    y: FockVector,
    depth_limit: Optional[int] = None,
    tol: float = 1e-8,
) -> FockVector:
    """Unit vector in ``span{L_w x}`` orthogonal to every ``P_d L_w x`` with ``|w| >= 1``.

    ``(x, y)`` should realize the functional ``A -> a_0``; that is checked on
    words up to ``depth_limit`` (default: the full depth).
    """
    space = x.space
    if depth_limit is None:
        depth_limit = space.depth
    mom = moments(rank_one(x, y), depth_limit)
    expect = np.zeros_like(mom)
    expect[0] = 1.0
    dev = float(np.max(np.abs(mom - expect)))
    if dev > tol:
        raise ValueError(f"(x, y) does not realize the constant-term functional: deviation {dev:.3e}")
    cols = []
    for w in TruncatedFockSpace(space.n, depth_limit).words[1:]:
        src, dst = space.shift_indices(w, LEFT)
        if src.size == 0:
            continue
        col = np.zeros(space.dim, dtype=complex)
        col[dst] = x.coeffs[src]
        if np.any(col):
            cols.append(col)
    if cols:
        q, _ = la.qr(np.column_stack(cols), mode="economic")
        z = x.coeffs - q @ (q.conj().T @ x.coeffs)
    else:
        z = np.array(x.coeffs)
    nz = np.linalg.norm(z)
    if nz < 1e-12 * max(x.norm(), 1e-300):
        raise ValueError("x lies in the span of its shifts; no wandering component")
    return FockVector(space, z / nz)

"""Numerical experiments: Dirichlet-kernel decay, adjoint power search and
Cesaro convergence, each returning a deterministic :class:`ExperimentResult`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .freealg import (
    RIGHT,
    FreePoly,
    apply,
    apply_adjoint,
    cesaro,
    is_isometry,
    matrix_norm,
    poly_matrix,
    product_compression,
)
from .toeplitz import ToeplitzSymbol
from .words import FockVector, TruncatedFockSpace, reproject

MIN_QUAD_POINTS = 1024
QUAD_RTOL = 1e-6
MAX_PER_PANEL = 256
PRECONDITION_TOL = 1e-12


@dataclass
class ExperimentResult:
    name: str
    params: dict
    rows: list[dict]
    seed: Optional[int] = None
    summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "params": self.params,
            "rows": self.rows,
            "seed": self.seed,
            "version": __version__,
        }
        if self.summary:
            out["summary"] = self.summary
        return _plain(out)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        rows = [_flatten(_plain(r)) for r in self.rows]
        header: list[str] = []
        for r in rows:
            header.extend(k for k in r if k not in header)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()


def _plain(obj: Any) -> Any:
    """JSON-safe copy: numpy scalars to Python, complex to {re, im}, tuples to lists."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


# Dirichlet kernel


@lru_cache(maxsize=None)
def _gauss_rule(m: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(m)


def _dirichlet_panels(k: int, per_panel: int) -> float:
    nodes, weights = _gauss_rule(per_panel)
    # zeros of D_k on (0, pi) split the half period into k + 1 smooth panels
    edges = np.concatenate([[0.0], 2 * np.pi * np.arange(1, k + 1) / (2 * k + 1), [np.pi]])
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2
    t = lo + half * (nodes[None, :] + 1)
    vals = np.abs(np.sin((k + 0.5) * t) / np.sin(t / 2))
    integral = float(np.sum(half * weights[None, :] * vals))
    # symmetric about pi; (1/2pi) * 2 * integral over [0, pi]
    return integral / np.pi


@lru_cache(maxsize=4096)
def dirichlet_l1(k: int, quad_points: int = 4096) -> float:
    """``(1/2pi) int_0^{2pi} |D_k(t)| dt`` with ``D_k(t) = sum_{|j|<=k} e^{ijt}``.

    Gauss-Legendre on the ``2k + 2`` panels between consecutive zeros over a
    full period, at most ``MAX_PER_PANEL`` nodes each (the panels are smooth,
    so extra nodes only cost time).  The result is checked against the same
    rule with half the points per panel.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if quad_points < MIN_QUAD_POINTS:
        raise ValueError(f"quad_points must be >= {MIN_QUAD_POINTS}")
    if k == 0:
        return 1.0
    per_panel = min(quad_points // (2 * k + 2), MAX_PER_PANEL)
    if per_panel < 4:
        raise ValueError(
            f"{quad_points} points give {per_panel} per panel for k = {k}; need >= 4"
        )
    fine = _dirichlet_panels(k, per_panel)
    coarse = _dirichlet_panels(k, max(per_panel // 2, 2))
    if abs(fine - coarse) > QUAD_RTOL * fine:
        raise ValueError(
            f"quadrature not converged for k = {k} with {quad_points} points "
            f"(refinement change {abs(fine - coarse) / fine:.2e})"
        )
    return fine


# Bercovici-type decay


def _check_isometry(p: FreePoly, space: TruncatedFockSpace, what: str):
    if p.side != RIGHT:
        raise ValueError(f"{what} must be a right-side polynomial")
    # word shifts act the same at every depth, so a shallow probe suffices
    probe = TruncatedFockSpace(space.n, p.degree + 3)
    ok, res = is_isometry(p, probe, tol=1e-10)
    if not ok:
        raise ValueError(f"{what} is not an isometry (residual {res:.3e})")


def _check_orthogonal_ranges(U: FreePoly, V: FreePoly, depth: int):
    probe = TruncatedFockSpace(max(U.max_letter, V.max_letter, 1), depth)
    probe = probe.with_depth(depth + max(U.degree, V.degree))
    g = probe.guard(max(U.degree, V.degree))
    cross = poly_matrix(U, probe)[:, :g].conj().T @ poly_matrix(V, probe)[:, :g]
    worst = float(np.max(np.abs(cross.toarray()), initial=0.0))
    if worst >= PRECONDITION_TOL:
        raise ValueError(f"U and V ranges are not orthogonal (cross term {worst:.3e})")


def eta_vector(U: FreePoly, V: FreePoly, xi: FockVector, k: int) -> FockVector:
    """``k^{-1/2} sum_{i=1}^k U^i V xi``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    space = xi.space
    need = max(xi.support_depth(), 0) + V.degree + k * U.degree
    if need > space.depth:
        raise ValueError(f"eta_{k} needs depth {need} > {space.depth}")
    _check_isometry(U, space, "U")
    _check_isometry(V, space, "V")
    _check_orthogonal_ranges(U, V, 2)
    term = apply(V, xi)
    total = space.zero()
    for _ in range(k):
        term = apply(U, term)
        total = total + term
    return total / math.sqrt(k)


def compressed_toeplitz_matrix(
    s: ToeplitzSymbol,
    U: FreePoly,
    V: FreePoly,
    xi: FockVector,
    nu: FockVector,
    size: int,
) -> tuple[np.ndarray, float]:
    """Matrix ``M[i, j] = (T U^j nu, U^i V xi)`` for ``0 <= i, j < size``.

    Computed in a space deep enough that every entry is exact.  Returns the
    matrix and its analyticity residual: the largest entry above the diagonal
    plus the largest deviation from constant diagonals.
    """
    if s.side != "R":
        raise ValueError("expects an R-Toeplitz symbol")
    space = xi.space
    ures = apply_adjoint(U, nu).norm()
    if ures >= PRECONDITION_TOL:
        raise ValueError(f"nu is not in the kernel of U^* (residual {ures:.3e})")
    depth = max(
        max(nu.support_depth(), 0) + size * U.degree + s.degree,
        max(xi.support_depth(), 0) + size * U.degree + V.degree,
    )
    if size * U.degree > space.depth:
        raise ValueError(f"size {size} does not fit depth {space.depth}")
    big = space.with_depth(max(depth, space.depth))
    tm = s.matrix(big)
    um = poly_matrix(U, big)
    left = [reproject(nu, big.depth).coeffs]
    right = [poly_matrix(V, big) @ reproject(xi, big.depth).coeffs]
    for _ in range(1, size):
        left.append(um @ left[-1])
        right.append(um @ right[-1])
    tl = np.column_stack([tm @ v for v in left])
    m = np.column_stack(right).conj().T @ tl
    upper = float(np.max(np.abs(np.triu(m, 1)), initial=0.0))
    diag_dev = 0.0
    for off in range(size):
        d = np.diagonal(m, -off)
        diag_dev = max(diag_dev, float(np.max(np.abs(d - d[0]))))
    return m, upper + diag_dev


def symbol_norm_cap(s: ToeplitzSymbol) -> float:
    """``sum |a_w| + sum |b_w|``, an upper bound for the operator norm."""
    return float(sum(abs(c) for c in s.analytic.values()) + sum(abs(c) for c in s.coanalytic.values()))


def symbol_norm_surrogate(s: ToeplitzSymbol, space: TruncatedFockSpace, seed: int = 0) -> float:
    """Largest singular value of the depth-``d`` compression (a lower bound for ``||T||``)."""
    m = s.matrix(space)
    if space.dim <= 256:
        return float(np.linalg.norm(m.toarray(), 2))
    return matrix_norm(m, 1e-6, seed=seed)


def bercovici_decay(
    s: ToeplitzSymbol,
    xi: FockVector,
    nu: FockVector,
    k_list: Sequence[int],
    U: Optional[FreePoly] = None,
    V: Optional[FreePoly] = None,
    quad_points: int = 4096,
    seed: Optional[int] = None,
) -> ExperimentResult:
    """Rows ``(k, |(T nu, eta_k)|, bounds)`` for ``eta_k`` built from ``U``, ``V``, ``xi``.

    ``(T nu, U^i V xi)`` is computed exactly for every ``i``: ``T nu`` lives on
    words of length ``<= |nu| + deg T``, so the compression of ``U^i V xi`` to
    that depth loses nothing that could pair with it.  The asserted bound uses
    the upper cap of ``||T||``; the compression-norm surrogate is reported too.
    """
    if s.side != "R":
        raise ValueError("expects an R-Toeplitz symbol")
    U = U if U is not None else FreePoly.monomial((1,), RIGHT)
    V = V if V is not None else FreePoly.monomial((2,), RIGHT)
    space = xi.space
    _check_isometry(U, space, "U")
    _check_isometry(V, space, "V")
    _check_orthogonal_ranges(U, V, 2)
    ures = apply_adjoint(U, nu).norm()
    if ures >= PRECONDITION_TOL:
        raise ValueError(f"nu is not in the kernel of U^* (residual {ures:.3e})")
    if max(nu.support_depth(), 0) + s.degree > space.depth:
        raise ValueError("support of nu plus the symbol degree exceeds the depth")
    k_list = sorted(set(int(k) for k in k_list))
    if not k_list or k_list[0] < 1:
        raise ValueError("k_list must contain integers >= 1")
    depth = max(nu.support_depth(), 0) + s.degree
    work = space.with_depth(max(depth, max(xi.support_depth(), 0) + V.degree))
    t_nu = s.matrix(work) @ reproject(nu, work.depth).coeffs
    um = poly_matrix(U, work)
    vec = poly_matrix(V, work) @ reproject(xi, work.depth).coeffs
    kmax = k_list[-1]
    coeffs = np.zeros(kmax + 1, dtype=complex)
    for i in range(1, kmax + 1):
        vec = um @ vec
        if not np.any(vec):
            break
        coeffs[i] = np.vdot(vec, t_nu)
    partial = np.cumsum(coeffs)
    cap = symbol_norm_cap(s)
    surrogate = symbol_norm_surrogate(s, space, seed or 0)
    scale = xi.norm() * nu.norm()
    rows = []
    for k in k_list:
        l1 = dirichlet_l1(k, quad_points)
        value = abs(partial[k]) / math.sqrt(k)
        bound = l1 / math.sqrt(k) * cap * scale
        rows.append(
            {
                "k": k,
                "value": value,
                "bound": bound,
                "bound_surrogate": l1 / math.sqrt(k) * surrogate * scale,
                "dirichlet_l1": l1,
                "ok": bool(value <= bound),
            }
        )
    summary = {
        "norm_cap": cap,
        "norm_surrogate": surrogate,
        "all_ok": all(r["ok"] for r in rows),
        "bound_ratio_last_first": rows[-1]["bound"] / rows[0]["bound"] if rows[0]["bound"] else 0.0,
    }
    params = {"k_list": k_list, "n": space.n, "depth": space.depth, "symbol": s.to_json(space.n)}
    return ExperimentResult("bercovici", params, rows, seed, summary)


# adjoint powers


def power_kill(V: FreePoly, vectors: Sequence[FockVector], eps: float, max_m: Optional[int] = None) -> int:
    """Smallest ``m`` with ``max_j ||(V^*)^m eta_j|| < eps``, by linear search."""
    if not vectors:
        return 0
    space = vectors[0].space
    _check_isometry(V, space, "V")
    if max_m is None:
        max_m = space.depth + 1
    current = list(vectors)
    for m in range(max_m + 1):
        if max(v.norm() for v in current) < eps:
            return m
        current = [apply_adjoint(V, v) for v in current]
    raise ValueError(f"no m <= {max_m} brings the vectors below {eps}")


# Cesaro means


def cesaro_convergence_suite(
    p: FreePoly,
    probes: Sequence[FockVector],
    k_list: Sequence[int],
    space: Optional[TruncatedFockSpace] = None,
    seed: Optional[int] = None,
) -> ExperimentResult:
    """Strong and Gram-entry convergence of the Cesaro means of ``p``.

    ``strong`` is the largest ``||(G_k(p) - p) x||`` over the probes and
    ``gram`` the largest entry of ``P (p^* G_k(p) - p^* p) P``.
    """
    if space is None:
        space = probes[0].space if probes else TruncatedFockSpace(max(p.max_letter, 1), p.degree)
    for x in probes:
        if max(x.support_depth(), 0) + p.degree > x.space.depth:
            raise ValueError("probe support plus degree exceeds its depth")
    total = float(sum(abs(a) for a in p.coeffs.values()))
    base = product_compression(p, p, space)
    rows = []
    for k in sorted(set(int(k) for k in k_list)):
        g = cesaro(p, k)
        # the deficit written out directly; g - p would cancel for large k
        diff = FreePoly(p.side, {w: -min(len(w) / k, 1.0) * a for w, a in p.coeffs.items()})
        strong = max((apply(diff, x).norm() for x in probes), default=0.0)
        gram = product_compression(p, g, space) - base
        rows.append(
            {
                "k": k,
                "strong": strong,
                "strong_bound": p.degree / k * total,
                "gram": float(abs(gram).max()) if gram.nnz else 0.0,
            }
        )
    params = {"k_list": [r["k"] for r in rows], "n": space.n, "depth": space.depth, "poly": p.to_json(space.n)}
    return ExperimentResult("cesaro", params, rows, seed)

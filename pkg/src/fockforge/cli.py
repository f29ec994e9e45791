"""Command-line front end: ``fock-forge <subcommand> [flags]``.

Every subcommand prints one :class:`ExperimentResult` as JSON (default) or
CSV.  Output depends only on the flags, the config file and the seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional

from . import batteries
from .dual import (
    FiniteRankFunctional,
    a1_iterate,
    extract_wandering,
    rank_one,
)
from .experiments import (
    ExperimentResult,
    bercovici_decay,
    cesaro_convergence_suite,
    dirichlet_l1,
)
from .factor import analytic_spectral_factor
from .freealg import LEFT, RIGHT, FreePoly, is_wandering
from .toeplitz import (
    ToeplitzSymbol,
    conjugate_by_word,
    flattening_error,
    flattening_word,
    gram_symbol,
    shortineq_sides,
    symbol_from_operator,
    toeplitz_residual,
)
from .words import EMPTY, TruncatedFockSpace, format_word

log = logging.getLogger("fockforge")

DEFAULTS = {
    "n": 2,
    "depth": 8,
    "seed": 0,
    "eps": 1e-6,
    "alpha": 0.5,
    "out": "json",
    "quad_points": 4096,
}
_TYPES = {"n": int, "depth": int, "seed": int, "eps": float, "alpha": float, "out": str, "quad_points": int}


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _TYPES:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _TYPES[key](value)
    return out


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Merge defaults, config file and explicit flags (in increasing priority)."""
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(read_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    for key, val in merged.items():
        setattr(args, key, val)
    if args.out not in ("json", "csv"):
        raise SystemExit(f"--out must be json or csv, got {args.out!r}")
    return args


def _load_json(path: Optional[str]):
    if path is None:
        return None
    return json.loads(Path(path).read_text())


def _k_list(text: Optional[str], default: list[int]) -> list[int]:
    if not text:
        return default
    return [int(k) for k in text.split(",") if k.strip()]


def _powers_of_two(limit: int) -> list[int]:
    out, k = [], 1
    while k <= limit:
        out.append(k)
        k *= 2
    return out


# subcommands


def cmd_cesaro(args) -> ExperimentResult:
    space = TruncatedFockSpace(args.n, args.depth)
    rng = batteries.rng_for(args.seed, 1)
    data = _load_json(args.input)
    if data is not None:
        p = FreePoly.from_json(data, args.n)
    else:
        p = batteries.random_poly(rng, args.n, min(3, args.depth))
    if p.side != LEFT:
        raise SystemExit("cesaro expects a left-side polynomial")
    probe_depth = args.depth - p.degree
    probes = [space.basis(EMPTY)] + [batteries.random_vector(rng, space, probe_depth) for _ in range(2)]
    res = cesaro_convergence_suite(p, probes, _k_list(args.k_list, _powers_of_two(256)), space, args.seed)
    res.params.update(n=args.n, depth=args.depth)
    return res


def _symbols(args, side: str, degree: int) -> list[ToeplitzSymbol]:
    data = _load_json(args.input)
    if data is not None:
        items = data if isinstance(data, list) else [data]
        return [ToeplitzSymbol.from_json(d, args.n) for d in items]
    rng = batteries.rng_for(args.seed, 2)
    return [batteries.random_symbol(rng, args.n, degree, side) for _ in range(args.count)]


def cmd_toeplitz_check(args) -> ExperimentResult:
    space = TruncatedFockSpace(args.n, args.depth)
    rows = []
    data = _load_json(args.input)
    if data is None:
        rng = batteries.rng_for(args.seed, 2)
        deg = min(3, args.depth - 1)
        symbols = [batteries.random_symbol(rng, args.n, deg, "LR"[i % 2]) for i in range(args.count)]
    else:
        symbols = _symbols(args, "L", 0)
    for i, s in enumerate(symbols):
        m = s.matrix(space)
        res = toeplitz_residual(m, s.side, space)
        back = symbol_from_operator(m, space, s.side)
        rows.append(
            {
                "index": i,
                "side": s.side,
                "degree": s.degree,
                "toeplitz_residual": res,
                "roundtrip_error": s.max_coeff_diff(back),
            }
        )
    return ExperimentResult("toeplitz-check", {"n": args.n, "depth": args.depth, "count": len(rows)}, rows, args.seed)


def cmd_flatten(args) -> ExperimentResult:
    symbols = _symbols(args, "L", 3)
    rows = []
    for i, s in enumerate(symbols):
        v = flattening_word(s, args.p, args.eps, args.n)
        conj = conjugate_by_word(s, v)
        rows.append(
            {
                "index": i,
                "word": format_word(v, args.n),
                "k": max(len(v) - 1, 0),
                "error": flattening_error(s, v, args.p, args.n),
                "conjugated": conj.to_json(args.n),
            }
        )
    params = {"n": args.n, "p": args.p, "eps": args.eps, "count": len(rows)}
    return ExperimentResult("flatten", params, rows, args.seed)


def cmd_factor(args) -> ExperimentResult:
    space = TruncatedFockSpace(args.n, args.depth)
    data = _load_json(args.input)
    if data is not None:
        s = ToeplitzSymbol.from_json(data, args.n)
    else:
        rng = batteries.rng_for(args.seed, 3)
        x = FreePoly(RIGHT, {EMPTY: 1.0, (1,): 0.5}) + batteries.random_poly(rng, args.n, 2, RIGHT, scale=0.1)
        s = gram_symbol(x, space.with_depth(max(args.depth, 2 * x.degree + 1)))
    A, pattern, residual = analytic_spectral_factor(s, space)
    rows = [
        {
            "depth": args.depth,
            "pattern_residual": pattern,
            "factor_residual": residual,
            "factor": A.to_json(args.n),
        }
    ]
    return ExperimentResult("factor", {"n": args.n, "depth": args.depth, "symbol": s.to_json(args.n)}, rows, args.seed)


def _witness(args, space: TruncatedFockSpace, default) -> FiniteRankFunctional:
    data = _load_json(args.input)
    if data is None:
        return default()
    return FiniteRankFunctional.from_json(data, space)


def cmd_a1_iterate(args) -> ExperimentResult:
    space = TruncatedFockSpace(args.n, args.depth)

    def default():
        rng = batteries.rng_for(args.seed, 4)
        support = max(args.depth - 1, 0)
        return rank_one(
            batteries.random_vector(rng, space, support, 0.4),
            batteries.random_vector(rng, space, support, 0.4),
        )

    f = _witness(args, space, default)
    _, _, trace = a1_iterate(f, args.alpha, args.K, space, p=args.p, seed=args.seed)
    params = {"n": args.n, "depth": args.depth, "alpha": args.alpha, "K": args.K, "p": args.p}
    return ExperimentResult("a1-iterate", params, trace, args.seed)


def cmd_wander(args) -> ExperimentResult:
    space = TruncatedFockSpace(args.n, args.depth)

    def default():
        x0 = space.vector({EMPTY: 1.0, (1, 1): 0.5})
        return rank_one(x0, space.basis(EMPTY))

    f = _witness(args, space, default)
    x, y, trace = a1_iterate(f, args.alpha, args.K, space, p=args.p, seed=args.seed)
    z = extract_wandering(x, y, tol=1e-8)
    limit = min(3, args.depth)
    _, deviation = is_wandering(z, limit)
    summary = {
        "wandering_deviation": deviation,
        "wandering_depth_limit": limit,
        "z": z.to_json(),
    }
    params = {"n": args.n, "depth": args.depth, "alpha": args.alpha, "K": args.K, "p": args.p}
    return ExperimentResult("wander", params, trace, args.seed, summary)


def cmd_dirichlet(args) -> ExperimentResult:
    rows = []
    for k in _k_list(args.k_list, _powers_of_two(64)):
        l1 = dirichlet_l1(k, args.quad_points)
        rows.append(
            {
                "k": k,
                "l1": l1,
                "ratio_log": l1 / math.log(k) if k >= 2 else None,
                "offset": l1 - 4 / math.pi**2 * math.log(k) if k >= 1 else None,
            }
        )
    return ExperimentResult("dirichlet", {"quad_points": args.quad_points}, rows, args.seed)


def cmd_shortineq_fuzz(args) -> ExperimentResult:
    space = TruncatedFockSpace(args.n, args.depth)
    rng = batteries.rng_for(args.seed, 5)
    deg = min(4, args.depth)
    rows = []
    for i in range(args.count):
        s = batteries.random_symbol(rng, args.n, deg, "L")
        u = batteries.random_word(rng, args.n, args.depth - s.degree)
        lhs, rhs = shortineq_sides(s, u, space)
        rows.append({"index": i, "word": format_word(u, args.n), "lhs": lhs, "rhs": rhs, "ok": lhs <= rhs + 1e-12})
    summary = {"violations": sum(not r["ok"] for r in rows)}
    return ExperimentResult("shortineq-fuzz", {"n": args.n, "depth": args.depth, "count": args.count}, rows, args.seed, summary)


def cmd_bercovici(args) -> ExperimentResult:
    space = TruncatedFockSpace(args.n, args.depth)
    rng = batteries.rng_for(args.seed, 6)
    data = _load_json(args.input)
    if data is not None:
        s = ToeplitzSymbol.from_json(data, args.n)
    else:
        s = batteries.random_symbol(rng, args.n, min(3, args.depth // 2), "R")
    support = max(args.depth - s.degree, 0) // 2
    xi = batteries.random_vector(rng, space, support)
    nu = batteries.random_kernel_vector(rng, space, support)
    return bercovici_decay(
        s, xi, nu, range(1, args.k_max + 1), quad_points=args.quad_points, seed=args.seed
    )


COMMANDS = {
    "cesaro": cmd_cesaro,
    "toeplitz-check": cmd_toeplitz_check,
    "flatten": cmd_flatten,
    "factor": cmd_factor,
    "a1-iterate": cmd_a1_iterate,
    "wander": cmd_wander,
    "dirichlet": cmd_dirichlet,
    "shortineq-fuzz": cmd_shortineq_fuzz,
    "bercovici": cmd_bercovici,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--n", type=int, help="alphabet size (default 2)")
    g.add_argument("--depth", type=int, help="truncation depth (default 8)")
    g.add_argument("--seed", type=int, help="random seed (default 0)")
    g.add_argument("--eps", type=float, help="tolerance (default 1e-6)")
    g.add_argument("--alpha", type=float, help="iteration ratio in (0, 1) (default 0.5)")
    g.add_argument("--out", choices=["json", "csv"], help="output format (default json)")
    g.add_argument("--quad-points", dest="quad_points", type=int, help="quadrature points (default 4096)")
    g.add_argument("--config", help="key = value file; flags take precedence")
    g.add_argument("--input", help="JSON input (polynomial, symbol or functional witness)")
    g.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="fock-forge", description="Truncated Fock space experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cesaro", parents=[common], help="Cesaro mean convergence")
    p.add_argument("--k-list", help="comma separated k values")
    p = sub.add_parser("toeplitz-check", parents=[common], help="symbol round trip and Toeplitz residual")
    p.add_argument("--count", type=int, default=20)
    p = sub.add_parser("flatten", parents=[common], help="flattening word search")
    p.add_argument("--p", type=int, default=2, help="band of word lengths to flatten")
    p.add_argument("--count", type=int, default=20)
    sub.add_parser("factor", parents=[common], help="graded Cholesky analytic factor")
    for name in ("a1-iterate", "wander"):
        p = sub.add_parser(name, parents=[common], help="rank-one approximation iteration" if name == "a1-iterate" else "wandering vector extraction")
        p.add_argument("--K", type=int, default=3 if name == "a1-iterate" else 1)
        p.add_argument("--p", type=int, default=None, help="fixed polynomial degree (default adaptive)")
    p = sub.add_parser("dirichlet", parents=[common], help="Dirichlet kernel L1 norms")
    p.add_argument("--k-list", help="comma separated k values")
    p = sub.add_parser("shortineq-fuzz", parents=[common], help="short inequality fuzzing")
    p.add_argument("--count", type=int, default=200)
    p = sub.add_parser("bercovici", parents=[common], help="Dirichlet decay of eta_k pairings")
    p.add_argument("--k-max", type=int, default=64)
    return parser


def run(argv=None) -> str:
    args = resolve(build_parser().parse_args(argv))
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr)
    result = COMMANDS[args.command](args)
    return result.to_json() if args.out == "json" else result.to_csv()


def main(argv=None) -> int:
    try:
        text = run(argv)
    except (ValueError, KeyError) as exc:
        print(f"fock-forge: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

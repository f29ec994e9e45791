"""Seeded random inputs shared by the command line and the test suite."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .freealg import LEFT, FreePoly
from .toeplitz import ToeplitzSymbol
from .words import EMPTY, FockVector, TruncatedFockSpace, Word


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, *stream])


def random_complex(rng: np.random.Generator, size=None):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def random_word(rng: np.random.Generator, n: int, max_len: int, min_len: int = 0) -> Word:
    length = int(rng.integers(min_len, max_len + 1))
    return tuple(int(a) for a in rng.integers(1, n + 1, size=length))


def random_poly(
    rng: np.random.Generator,
    n: int,
    degree: int,
    side: str = LEFT,
    terms: Optional[int] = None,
    scale: float = 1.0,
) -> FreePoly:
    """Sparse polynomial of degree at most ``degree`` with complex normal coefficients."""
    if terms is None:
        terms = int(rng.integers(1, 5))
    coeffs = {}
    for _ in range(terms):
        w = random_word(rng, n, degree)
        coeffs[w] = coeffs.get(w, 0) + scale * complex(random_complex(rng))
    return FreePoly(side, coeffs)


def random_symbol(
    rng: np.random.Generator, n: int, degree: int, side: str = "L", terms: Optional[int] = None
) -> ToeplitzSymbol:
    if terms is None:
        terms = int(rng.integers(1, 5))
    a, b = {}, {}
    for _ in range(terms):
        w = random_word(rng, n, degree)
        a[w] = a.get(w, 0) + complex(random_complex(rng))
        v = random_word(rng, n, degree, min_len=1) if degree > 0 else None
        if v is not None and rng.random() < 0.7:
            b[v] = b.get(v, 0) + complex(random_complex(rng))
    return ToeplitzSymbol(side, a, b)


def random_vector(
    rng: np.random.Generator,
    space: TruncatedFockSpace,
    support: int,
    decay: float = 0.5,
    unit: bool = True,
) -> FockVector:
    """Dense random vector on words of length ``<= support``, weighted by ``decay^|w|``."""
    if support > space.depth:
        raise ValueError("support exceeds depth")
    k = space.guard(space.depth - support)
    c = np.zeros(space.dim, dtype=complex)
    c[:k] = random_complex(rng, k) * decay ** space.lengths[:k]
    v = FockVector(space, c)
    return v / v.norm() if unit else v


def random_kernel_vector(
    rng: np.random.Generator, space: TruncatedFockSpace, support: int, avoid_last: int = 1
) -> FockVector:
    """Unit vector with a constant term and no word ending in ``avoid_last``."""
    k = space.guard(space.depth - support)
    c = np.zeros(space.dim, dtype=complex)
    c[:k] = random_complex(rng, k) * 0.5 ** space.lengths[:k]
    for i in range(1, k):
        if space.words[i][-1] == avoid_last:
            c[i] = 0
    c[0] = 1.0
    v = FockVector(space, c)
    return v / v.norm()


def constant_symbol(value: complex = 1.0, side: str = "L") -> ToeplitzSymbol:
    return ToeplitzSymbol(side, {EMPTY: value})

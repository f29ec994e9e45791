"""Free semigroup words and the truncated Fock space.

Words are plain tuples of letters in ``1..n``; the empty word is ``()``.
Basis vectors of the truncated Fock space are indexed in length-lexicographic
order, so the words of length at most ``k`` occupy a prefix of the index range
for every ``k``.  That makes changing the truncation depth a slice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

Word = tuple[int, ...]
EMPTY: Word = ()

MAX_DIM = 2**31


def word_count(n: int, max_len: int) -> int:
    """Number of words of length ``<= max_len`` over ``n`` letters."""
    if n == 1:
        return max_len + 1
    return (n ** (max_len + 1) - 1) // (n - 1)


def make_word(letters: Iterable[int], n: Optional[int] = None) -> Word:
    w = tuple(int(a) for a in letters)
    for a in w:
        if a < 1 or (n is not None and a > n):
            raise ValueError(f"letter {a} outside alphabet 1..{n}")
    return w


def enumerate_words(n: int, max_len: int) -> list[Word]:
    """All words of length ``<= max_len`` in length-lexicographic order."""
    if n < 1:
        raise ValueError("alphabet size must be >= 1")
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    if word_count(n, max_len) > MAX_DIM:
        raise OverflowError(f"{word_count(n, max_len)} words exceed the index limit")
    letters = range(1, n + 1)
    out: list[Word] = []
    for k in range(max_len + 1):
        out.extend(itertools.product(letters, repeat=k))
    return out


def concat(u: Word, v: Word) -> Word:
    return tuple(u) + tuple(v)


def strip_prefix(u: Word, v: Word) -> Optional[Word]:
    """Return ``w`` with ``v == u + w``, or None when ``u`` is not a prefix."""
    k = len(u)
    if k <= len(v) and tuple(v[:k]) == tuple(u):
        return tuple(v[k:])
    return None


def strip_suffix(u: Word, v: Word) -> Optional[Word]:
    """Return ``w`` with ``v == w + u``, or None when ``u`` is not a suffix."""
    k = len(u)
    if k > len(v):
        return None
    if k == 0:
        return tuple(v)
    if tuple(v[-k:]) == tuple(u):
        return tuple(v[:-k])
    return None


def format_word(w: Word, n: int) -> str:
    if n <= 9:
        return "".join(str(a) for a in w)
    return ".".join(str(a) for a in w)


def parse_word(s: str, n: int) -> Word:
    s = s.strip()
    if not s:
        return EMPTY
    if n <= 9 and "." not in s:
        return make_word((int(c) for c in s), n)
    return make_word((int(c) for c in s.split(".")), n)


@dataclass(frozen=True)
class TruncatedFockSpace:
    """Span of the basis vectors ``xi_w`` with ``|w| <= depth``."""

    n: int
    depth: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("alphabet size must be >= 1")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if word_count(self.n, self.depth) > MAX_DIM:
            raise OverflowError(
                f"space n={self.n}, depth={self.depth} exceeds {MAX_DIM} basis vectors"
            )

    @cached_property
    def dim(self) -> int:
        return word_count(self.n, self.depth)

    @cached_property
    def words(self) -> list[Word]:
        return enumerate_words(self.n, self.depth)

    @cached_property
    def lengths(self) -> np.ndarray:
        out = np.empty(self.dim, dtype=np.int64)
        for k in range(self.depth + 1):
            out[self.offset(k) : self.offset(k + 1)] = k
        return out

    @cached_property
    def _values(self) -> np.ndarray:
        # base-n value of (letters - 1) within each length block
        return np.arange(self.dim, dtype=np.int64) - self._offsets[self.lengths]

    @cached_property
    def _offsets(self) -> np.ndarray:
        return np.array([self.offset(k) for k in range(self.depth + 2)], dtype=np.int64)

    def offset(self, k: int) -> int:
        """Index of the first word of length ``k``."""
        return word_count(self.n, k - 1) if k > 0 else 0

    def index(self, w: Word) -> int:
        if len(w) > self.depth:
            raise KeyError(f"word of length {len(w)} beyond depth {self.depth}")
        val = 0
        for a in w:
            if not 1 <= a <= self.n:
                raise KeyError(f"letter {a} outside alphabet 1..{self.n}")
            val = val * self.n + (a - 1)
        return self.offset(len(w)) + val

    def word(self, i: int) -> Word:
        return self.words[i]

    def guard(self, g: int) -> int:
        """Number of basis words of length ``<= depth - g`` (a prefix of indices)."""
        if g > self.depth:
            return 0
        return word_count(self.n, self.depth - g)

    def with_depth(self, depth: int) -> "TruncatedFockSpace":
        return TruncatedFockSpace(self.n, depth)

    def basis(self, w: Word) -> "FockVector":
        c = np.zeros(self.dim, dtype=complex)
        c[self.index(w)] = 1.0
        return FockVector(self, c)

    def zero(self) -> "FockVector":
        return FockVector(self, np.zeros(self.dim, dtype=complex))

    def vector(self, coeffs: Mapping[Word, complex]) -> "FockVector":
        c = np.zeros(self.dim, dtype=complex)
        for w, a in coeffs.items():
            c[self.index(tuple(w))] += a
        return FockVector(self, c)

    def shift_indices(self, v: Word, side: str) -> tuple[np.ndarray, np.ndarray]:
        """Index pairs ``(u, v u)`` (side ``left``) or ``(u, u v)`` (``right``)."""
        return _shift_indices(self, tuple(v), side)


@lru_cache(maxsize=4096)
def _shift_indices(space: TruncatedFockSpace, v: Word, side: str):
    m = len(v)
    src_count = space.guard(m)
    src = np.arange(src_count, dtype=np.int64)
    if src_count == 0:
        return src, src.copy()
    n = space.n
    vval = 0
    for a in v:
        vval = vval * n + (a - 1)
    lens = space.lengths[:src_count]
    vals = space._values[:src_count]
    offs = space._offsets[lens + m]
    if side == "left":
        dst = offs + vval * n**lens + vals
    elif side == "right":
        dst = offs + vals * n**m + vval
    else:
        raise ValueError(f"unknown side {side!r}")
    return src, dst


@dataclass(frozen=True, eq=False)
class FockVector:
    """Complex coefficient vector on a truncated Fock space."""

    space: TruncatedFockSpace
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (self.space.dim,):
            raise ValueError(f"expected {self.space.dim} coefficients, got {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def _check(self, other: "FockVector"):
        if self.space != other.space:
            raise ValueError(f"space mismatch: {self.space} vs {other.space}")

    def __add__(self, other: "FockVector") -> "FockVector":
        self._check(other)
        return FockVector(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other: "FockVector") -> "FockVector":
        self._check(other)
        return FockVector(self.space, self.coeffs - other.coeffs)

    def __neg__(self) -> "FockVector":
        return FockVector(self.space, -self.coeffs)

    def __mul__(self, scalar: complex) -> "FockVector":
        return FockVector(self.space, self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "FockVector":
        return FockVector(self.space, self.coeffs / scalar)

    def __getitem__(self, w: Word) -> complex:
        return complex(self.coeffs[self.space.index(tuple(w))])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def support_depth(self) -> int:
        """Length of the longest word with a nonzero coefficient (-1 for zero)."""
        nz = np.flatnonzero(self.coeffs)
        if nz.size == 0:
            return -1
        return int(self.space.lengths[nz[-1]])

    def items(self) -> list[tuple[Word, complex]]:
        return [(self.space.word(i), complex(self.coeffs[i])) for i in np.flatnonzero(self.coeffs)]

    def allclose(self, other: "FockVector", atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= atol)

    def to_json(self) -> list[dict]:
        n = self.space.n
        return [
            {"word": format_word(w, n), "re": a.real, "im": a.imag} for w, a in self.items()
        ]

    @classmethod
    def from_json(cls, space: TruncatedFockSpace, data: Sequence[Mapping]) -> "FockVector":
        coeffs: dict[Word, complex] = {}
        for entry in data:
            w = parse_word(entry["word"], space.n)
            coeffs[w] = coeffs.get(w, 0) + complex(entry.get("re", 0.0), entry.get("im", 0.0))
        return space.vector(coeffs)


def inner(x: FockVector, y: FockVector) -> complex:
    """``sum_w x_w conj(y_w)``; linear in the first argument."""
    x._check(y)
    return complex(np.vdot(y.coeffs, x.coeffs))


def reproject(x: FockVector, new_depth: int) -> FockVector:
    """Copy ``x`` into the truncation of depth ``new_depth``."""
    target = x.space.with_depth(new_depth)
    c = np.zeros(target.dim, dtype=complex)
    k = min(target.dim, x.space.dim)
    c[:k] = x.coeffs[:k]
    return FockVector(target, c)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockforge.words import (
    EMPTY,
    FockVector,
    TruncatedFockSpace,
    concat,
    enumerate_words,
    format_word,
    inner,
    parse_word,
    reproject,
    strip_prefix,
    strip_suffix,
    word_count,
)

from oracles import words_upto

words2 = st.lists(st.integers(1, 2), max_size=6).map(tuple)


def test_enumerate_small_cases():
    assert enumerate_words(2, 1) == [(), (1,), (2,)]
    assert len(enumerate_words(2, 3)) == 15
    w3 = enumerate_words(3, 2)
    assert len(w3) == 13 and w3[-1] == (3, 3)


@pytest.mark.parametrize("n,d", [(1, 5), (2, 6), (3, 4), (4, 3)])
def test_enumeration_matches_reference_order(n, d):
    got = enumerate_words(n, d)
    assert got == words_upto(n, d)
    assert len(set(got)) == len(got) == word_count(n, d)


def test_enumerate_rejects_bad_input():
    with pytest.raises(ValueError):
        enumerate_words(0, 3)
    with pytest.raises(OverflowError):
        enumerate_words(2, 40)
    with pytest.raises(OverflowError):
        TruncatedFockSpace(10, 12)


def test_concat_and_strip_examples():
    assert concat(EMPTY, (1, 2)) == (1, 2)
    assert concat((1, 2), (2, 1)) == (1, 2, 2, 1)
    assert concat((1,), (1,)) == (1, 1)
    assert strip_prefix((1, 2), (1, 2, 2, 1)) == (2, 1)
    assert strip_prefix((2,), (1, 2, 2, 1)) is None
    assert strip_prefix(EMPTY, (2, 1)) == (2, 1)
    assert strip_suffix((1, 2), (2, 1, 2)) == (2,)
    assert strip_suffix((1, 2), (2, 1)) is None
    assert strip_suffix(EMPTY, (2, 1)) == (2, 1)


@given(words2, words2)
def test_strip_inverts_concat(u, v):
    assert strip_prefix(u, concat(u, v)) == v
    assert strip_suffix(v, concat(u, v)) == u
    assert len(concat(u, v)) == len(u) + len(v)


@given(words2)
def test_word_serialization_roundtrip(w):
    assert parse_word(format_word(w, 2), 2) == w


def test_serialization_formats():
    assert format_word((1, 2, 2, 1), 2) == "1221"
    assert format_word(EMPTY, 3) == ""
    assert format_word((1, 12, 3), 12) == "1.12.3"
    assert parse_word("1.12.3", 12) == (1, 12, 3)
    with pytest.raises(ValueError):
        parse_word("13", 2)


def test_space_dimension_and_offsets():
    s = TruncatedFockSpace(2, 3)
    assert s.dim == 15
    assert [s.offset(k) for k in range(4)] == [0, 1, 3, 7]
    assert s.guard(1) == 7 and s.guard(4) == 0


@settings(max_examples=30)
@given(st.integers(1, 4), st.integers(0, 4))
def test_index_bijection(n, d):
    s = TruncatedFockSpace(n, d)
    for i, w in enumerate(s.words):
        assert s.index(w) == i and s.word(i) == w


@pytest.mark.parametrize("side", ["left", "right"])
def test_shift_indices_match_naive(side):
    s = TruncatedFockSpace(3, 4)
    for v in [(), (2,), (1, 3), (3, 3, 1)]:
        src, dst = s.shift_indices(v, side)
        for a, b in zip(src, dst):
            w = s.word(a)
            assert s.word(b) == (v + w if side == "left" else w + v)
        assert len(src) == sum(1 for w in s.words if len(w) + len(v) <= 4)


def test_basis_orthonormal():
    s = TruncatedFockSpace(2, 4)
    g = np.array([[inner(s.basis(u), s.basis(v)) for v in s.words] for u in s.words])
    assert np.max(np.abs(g - np.eye(s.dim))) < 1e-15


def test_inner_convention():
    s = TruncatedFockSpace(2, 2)
    x = s.vector({(): 1.0, (1,): 1j})
    assert inner(s.basis((1,)), s.basis((1,))) == 1
    assert inner(s.basis((1,)), s.basis((2,))) == 0
    assert inner(x, s.basis((1,))) == 1j
    assert np.isclose(inner(x, x), x.norm() ** 2)


@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False), min_size=7, max_size=7),
       st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False), min_size=7, max_size=7))
def test_inner_conjugate_symmetric(a, b):
    s = TruncatedFockSpace(2, 2)
    x, y = FockVector(s, a), FockVector(s, b)
    assert np.isclose(inner(x, y), np.conj(inner(y, x)))
    assert inner(x, x).real >= 0


def test_vector_arithmetic_and_json():
    s = TruncatedFockSpace(2, 3)
    x = s.vector({(1, 2): 2 - 1j, (): 0.5})
    y = (x * 2 - x) / 1
    assert y.allclose(x)
    assert x[(1, 2)] == 2 - 1j
    assert x.support_depth() == 2 and s.zero().support_depth() == -1
    assert FockVector.from_json(s, x.to_json()).allclose(x, 0)
    with pytest.raises(ValueError):
        x + TruncatedFockSpace(2, 2).zero()
    with pytest.raises(ValueError):
        x.coeffs[0] = 1


def test_reproject_examples():
    s3 = TruncatedFockSpace(2, 3)
    assert reproject(s3.basis((1, 1)), 1).norm() == 0
    s1 = TruncatedFockSpace(2, 1)
    up = reproject(s1.basis((1,)), 4)
    assert up.space.depth == 4 and up[(1,)] == 1 and up.norm() == 1
    x = s3.vector({(1,): 1, (2, 2, 1): 3})
    assert reproject(x, 3).allclose(x, 0)
    assert reproject(x, 2).norm() <= x.norm()

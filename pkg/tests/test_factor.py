import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockforge import batteries
from fockforge.factor import (
    analytic_spectral_factor,
    bounded_below_adjust,
    factor_from_summands,
    min_singular_value_guarded,
    shift_word,
    verify_factorization,
)
from fockforge.freealg import LEFT, RIGHT, FreePoly, product_compression
from fockforge.toeplitz import ToeplitzSymbol, gram_symbol, toeplitz_residual
from fockforge.words import TruncatedFockSpace

from oracles import summand_symbol_coeffs, summand_symbol_words, symbol_dense

seeds = st.integers(0, 2**32 - 1)
I_L = FreePoly.identity(LEFT)


def summand_symbol(c, A):
    a, b = summand_symbol_words(c, [p.coeffs for p in A])
    return ToeplitzSymbol("R", a, b)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_summand_oracles_agree(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 4))
    c = list(batteries.random_complex(rng, m))
    A = [batteries.random_poly(rng, 2, 2, LEFT).coeffs for _ in range(m)]
    a1, b1 = summand_symbol_coeffs(c, A, 2, 4, 2)
    a2, b2 = summand_symbol_words(c, A)
    for x, y in ((a1, a2), (b1, b2)):
        assert all(abs(x.get(w, 0) - y.get(w, 0)) < 1e-12 for w in set(x) | set(y))


def test_single_summand():
    B, C = factor_from_summands([1], [I_L], 2)
    assert B.coeffs == {(1, 2): 1} and C.coeffs == {(1, 2): 1}
    s = TruncatedFockSpace(2, 6)
    assert verify_factorization(ToeplitzSymbol.identity("R"), B, C, s) < 1e-12


def test_two_summands_give_identity():
    s = TruncatedFockSpace(2, 6)
    B, C = factor_from_summands([2, -1], [I_L, FreePoly.monomial((1,), LEFT)], 2)
    assert verify_factorization(ToeplitzSymbol.identity("R"), B, C, s) < 1e-12
    assert toeplitz_residual(product_compression(B, C, s), "R", s) < 1e-12


def test_rejections():
    with pytest.raises(ValueError):
        factor_from_summands([1], [I_L], 1)
    with pytest.raises(ValueError):
        factor_from_summands([1, 2], [I_L], 2)
    with pytest.raises(ValueError):
        factor_from_summands([], [], 2)
    with pytest.raises(ValueError):
        verify_factorization(ToeplitzSymbol.identity("L"), I_L, I_L, TruncatedFockSpace(2, 3))


def test_wrong_factorization_residual():
    s = TruncatedFockSpace(2, 5)
    res = verify_factorization(
        ToeplitzSymbol.identity("R"), FreePoly.monomial((1,), LEFT), FreePoly.monomial((2,), LEFT), s
    )
    assert res == 1


def test_bounded_below_examples():
    L12 = FreePoly.monomial((1, 2), LEFT)
    B2, C2 = bounded_below_adjust(L12, L12, 1)
    assert B2.coeffs == {(1, 2): 1, (1, 1, 2): 1}
    assert C2.coeffs == {(1, 2): 1, (1, 1, 1, 2): 1}
    s = TruncatedFockSpace(2, 6)
    assert verify_factorization(ToeplitzSymbol.identity("R"), B2, C2, s) < 1e-12
    assert min_singular_value_guarded(B2, s) >= 1 - 1e-12
    zero = FreePoly(LEFT)
    B0, C0 = bounded_below_adjust(zero, zero, 0)
    assert B0.coeffs == {(1, 2): 1} and C0.coeffs == {(1, 1, 2): 1}
    assert verify_factorization(ToeplitzSymbol("R"), B0, C0, s) < 1e-12


def test_shift_words_have_orthogonal_ranges():
    s = TruncatedFockSpace(2, 8)
    m = 4
    shifts = [FreePoly.monomial(shift_word(i), LEFT).matrix(s) for i in range(1, m + 3)]
    g = s.guard(m + 2)
    for i, a in enumerate(shifts):
        for j, b in enumerate(shifts):
            if i != j:
                cross = (a[:, :g].conj().T @ b[:, :g]).toarray()
                assert np.all(cross == 0)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_factor_matches_summand_symbol(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 4))
    c = list(rng.standard_normal(m) + 1j * rng.standard_normal(m))
    A = [batteries.random_poly(rng, 2, 2, LEFT) for _ in range(m)]
    s = TruncatedFockSpace(2, 7)
    target = summand_symbol(c, A)
    B, C = factor_from_summands(c, A, 2)
    assert verify_factorization(target, B, C, s) < 1e-10
    B2, C2 = bounded_below_adjust(B, C, m)
    assert verify_factorization(target, B2, C2, s) < 1e-10


def test_spectral_factor_identity():
    A, pat, res = analytic_spectral_factor(ToeplitzSymbol.identity("L"), TruncatedFockSpace(2, 4))
    assert A.coeffs == {(): 1} and pat == 0 and res == 0


def test_candidate_factor_of_degenerate_symbol_is_exact():
    s = ToeplitzSymbol("L", {(): 2, (1,): 1}, {(1,): 1})
    cand = FreePoly(RIGHT, {(): 1, (1,): 1})
    assert verify_factorization(s, cand, cand, TruncatedFockSpace(2, 6)) < 1e-15


def test_degenerate_symbol_factor_residual_decreases():
    # 2 + z + 1/z vanishes at z = -1, so the graded factor converges slowly
    s = ToeplitzSymbol("L", {(): 2, (1,): 1}, {(1,): 1})
    res = []
    for d in (4, 6, 8):
        _, pat, r = analytic_spectral_factor(s, TruncatedFockSpace(2, d))
        assert pat < 1e-12
        res.append(r)
    assert res[0] > res[1] > res[2]


def test_spectral_factor_recovers_known_factor():
    x = FreePoly(RIGHT, {(): 1, (1,): 0.5})
    s = gram_symbol(x, TruncatedFockSpace(2, 4))
    A, pat, res = analytic_spectral_factor(s, TruncatedFockSpace(2, 10))
    phase = A.coeffs[()] / abs(A.coeffs[()])
    diff = max(abs(A.coeffs.get(w, 0) / phase - x.coeffs.get(w, 0)) for w in set(A.coeffs) | set(x.coeffs))
    assert diff < 1e-6
    assert pat < 1e-12


def test_spectral_factor_rejects_indefinite():
    s = ToeplitzSymbol("L", {(): 1, (1,): 3}, {(1,): 3})
    with pytest.raises(ValueError):
        analytic_spectral_factor(s, TruncatedFockSpace(2, 4))


def test_spectral_factor_pattern_on_strictly_positive_symbol():
    x = FreePoly(RIGHT, {(): 1, (2,): 0.3, (1, 2): -0.2j})
    s = gram_symbol(x, TruncatedFockSpace(2, 5))
    res = []
    for d in (6, 8):
        _, pat, r = analytic_spectral_factor(s, TruncatedFockSpace(2, d))
        assert pat < 1e-12
        res.append(r)
    # truncation error of the graded factor shrinks with depth
    assert res[1] < res[0] / 4 and res[1] < 1e-4
    assert np.allclose(s.matrix(TruncatedFockSpace(2, 4)).toarray(), symbol_dense("L", s.analytic, s.coanalytic, 2, 4))

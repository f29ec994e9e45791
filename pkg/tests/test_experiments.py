import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockforge import batteries
from fockforge.experiments import (
    ExperimentResult,
    bercovici_decay,
    cesaro_convergence_suite,
    compressed_toeplitz_matrix,
    dirichlet_l1,
    eta_vector,
    power_kill,
    symbol_norm_cap,
    symbol_norm_surrogate,
)
from fockforge.freealg import LEFT, RIGHT, FreePoly, op_norm
from fockforge.toeplitz import ToeplitzSymbol
from fockforge.words import EMPTY, TruncatedFockSpace

from oracles import dirichlet_l1_k1

seeds = st.integers(0, 2**32 - 1)
R1 = FreePoly.monomial((1,), RIGHT)
R2 = FreePoly.monomial((2,), RIGHT)


def test_dirichlet_small_cases():
    assert dirichlet_l1(0) == 1.0
    assert math.isclose(dirichlet_l1(1), dirichlet_l1_k1(), rel_tol=1e-10)


def test_dirichlet_against_brute_force_quadrature():
    # |D_k| on a fine uniform grid (trapezoid on a periodic integrand)
    t = np.linspace(0, 2 * np.pi, 400_001)[:-1]
    for k in (2, 5, 17):
        d = 1 + 2 * sum(np.cos(j * t) for j in range(1, k + 1))
        assert math.isclose(dirichlet_l1(k), np.mean(np.abs(d)), rel_tol=1e-5)


def test_dirichlet_logarithmic_growth():
    # L(k) = (4/pi^2) ln k + O(1): the offset settles while L(k)/ln k still drifts
    q = 2**17
    offs = [dirichlet_l1(k, q) - 4 / math.pi**2 * math.log(k) for k in (200, 500, 1000, 2000)]
    assert max(offs) - min(offs) < 2e-3
    steps = np.abs(np.diff(offs))
    assert np.all(steps[1:] < steps[:-1])
    assert all(dirichlet_l1(a, q) < dirichlet_l1(b, q) for a, b in [(1, 2), (10, 20), (200, 400)])


def test_dirichlet_errors():
    with pytest.raises(ValueError):
        dirichlet_l1(5, quad_points=100)
    with pytest.raises(ValueError):
        dirichlet_l1(-1)
    with pytest.raises(ValueError):
        dirichlet_l1(2000, quad_points=1024)


def test_eta_examples():
    s = TruncatedFockSpace(2, 6)
    e = s.basis(EMPTY)
    assert eta_vector(R1, R2, e, 1).allclose(s.basis((2, 1)), 0)
    assert eta_vector(R1, R2, e, 2).allclose(s.vector({(2, 1): 1, (2, 1, 1): 1}) / math.sqrt(2))
    with pytest.raises(ValueError):
        eta_vector(R1, R2, e, 6)
    with pytest.raises(ValueError):
        eta_vector(FreePoly(RIGHT, {(1,): 2.0}), R2, e, 1)
    with pytest.raises(ValueError):
        eta_vector(R1, R1, e, 1)


@settings(max_examples=20)
@given(seeds, st.integers(1, 5))
def test_eta_unit(seed, k):
    rng = np.random.default_rng(seed)
    s = TruncatedFockSpace(2, 8)
    xi = batteries.random_vector(rng, s, 2)
    assert math.isclose(eta_vector(R1, R2, xi, k).norm(), 1, rel_tol=1e-12)


def test_compressed_matrix_identity_symbol():
    s = TruncatedFockSpace(2, 8)
    nu = s.basis((1, 2))
    m, res = compressed_toeplitz_matrix(ToeplitzSymbol.identity("R"), R1, R2, s.basis(EMPTY), nu, 4)
    assert np.all(m == 0) and res == 0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_compressed_matrix_is_analytic_toeplitz(seed):
    rng = np.random.default_rng(seed)
    s = TruncatedFockSpace(2, 14)
    sym = batteries.random_symbol(rng, 2, 2, "R")
    nu = batteries.random_kernel_vector(rng, s, 2)
    xi = batteries.random_vector(rng, s, 2)
    m, res = compressed_toeplitz_matrix(sym, R1, R2, xi, nu, 8)
    assert res < 1e-10
    # the compression of T cannot exceed T
    sigma = np.linalg.norm(m, 2)
    assert sigma <= symbol_norm_cap(sym) * xi.norm() * nu.norm() + 1e-12
    assert sigma <= symbol_norm_surrogate(sym, TruncatedFockSpace(2, 6)) + 1e-9


def test_compressed_matrix_rejects_bad_nu():
    s = TruncatedFockSpace(2, 8)
    with pytest.raises(ValueError):
        compressed_toeplitz_matrix(ToeplitzSymbol.identity("R"), R1, R2, s.basis(EMPTY), s.basis((1,)), 4)


def test_bercovici_identity_is_zero():
    s = TruncatedFockSpace(2, 8)
    res = bercovici_decay(ToeplitzSymbol.identity("R"), s.basis(EMPTY), s.basis((1, 2)), range(1, 9))
    assert all(row["value"] == 0 for row in res.rows)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_bercovici_value_below_bound(seed):
    rng = np.random.default_rng(seed)
    s = TruncatedFockSpace(2, 10)
    sym = batteries.random_symbol(rng, 2, 3, "R")
    nu = batteries.random_kernel_vector(rng, s, 3)
    xi = batteries.random_vector(rng, s, 3)
    res = bercovici_decay(sym, xi, nu, range(1, 33))
    assert res.summary["all_ok"]
    assert any(row["value"] > 0 for row in res.rows)
    for row in res.rows:
        assert row["value"] <= row["bound"]


def test_bercovici_rejections():
    s = TruncatedFockSpace(2, 6)
    sym = ToeplitzSymbol.identity("R")
    with pytest.raises(ValueError):
        bercovici_decay(sym, s.basis(EMPTY), s.basis((1,)), [1])
    with pytest.raises(ValueError):
        bercovici_decay(sym, s.basis(EMPTY), s.basis(EMPTY), [0])
    with pytest.raises(ValueError):
        bercovici_decay(ToeplitzSymbol.identity("L"), s.basis(EMPTY), s.basis(EMPTY), [1])


def test_power_kill_examples():
    s = TruncatedFockSpace(2, 6)
    assert power_kill(R2, [s.basis((2, 2))], 1e-9) == 3
    assert power_kill(R1, [s.basis((2,))], 1e-9) == 1
    rng = np.random.default_rng(0)
    R12 = FreePoly.monomial((1, 2), RIGHT)
    assert power_kill(R12, [batteries.random_vector(rng, s, 5) for _ in range(4)], 1e-9) <= 3
    assert power_kill(R1, [], 1e-9) == 0


@settings(max_examples=30)
@given(seeds)
def test_power_kill_is_minimal(seed):
    rng = np.random.default_rng(seed)
    s = TruncatedFockSpace(2, 6)
    vecs = [batteries.random_vector(rng, s, int(rng.integers(0, 6)), unit=False) for _ in range(2)]
    eps = 1e-3
    m = power_kill(R2, vecs, eps)

    def after(k):
        out = []
        for v in vecs:
            for _ in range(k):
                v = FreePoly.monomial((2,), RIGHT).matrix(s).conj().T @ v.coeffs
                v = s.vector(dict(zip(s.words, v)))
            out.append(v.norm())
        return max(out)

    assert after(m) < eps
    if m > 0:
        assert after(m - 1) >= eps


def test_cesaro_examples():
    s = TruncatedFockSpace(2, 5)
    res = cesaro_convergence_suite(FreePoly.identity(LEFT), [s.basis(EMPTY), s.basis((1, 2))], [1, 2, 5])
    assert all(r["strong"] == 0 and r["gram"] == 0 for r in res.rows)
    q = FreePoly(LEFT, {(): 1.0, (1,): 1.0})
    res = cesaro_convergence_suite(q, [s.basis(EMPTY)], [10])
    assert math.isclose(res.rows[0]["strong"], 0.1)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_cesaro_bound_rows(seed):
    rng = np.random.default_rng(seed)
    p = batteries.random_poly(rng, 2, int(rng.integers(1, 4)), LEFT)
    s = TruncatedFockSpace(2, 7)
    probes = [batteries.random_vector(rng, s, 3) for _ in range(3)]
    res = cesaro_convergence_suite(p, probes, [1, 2, 4, 8, 16])
    for row in res.rows:
        assert row["strong"] <= row["strong_bound"] + 1e-12
    strong = [r["strong"] for r in res.rows]
    assert strong[-1] <= strong[0] + 1e-12


def test_result_serialization_is_deterministic():
    s = TruncatedFockSpace(2, 8)
    rng = np.random.default_rng(5)
    sym = batteries.random_symbol(rng, 2, 2, "R")
    nu = batteries.random_kernel_vector(rng, s, 2)
    a = bercovici_decay(sym, s.basis(EMPTY), nu, [1, 2, 4], seed=5)
    b = bercovici_decay(sym, s.basis(EMPTY), nu, [1, 2, 4], seed=5)
    assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv()
    d = json.loads(a.to_json())
    assert {"name", "params", "rows", "seed", "version"} <= set(d)
    header = a.to_csv().splitlines()[0].split(",")
    assert header[:2] == ["k", "value"]


def test_norm_cap_dominates_truncated_norm():
    sym = ToeplitzSymbol("R", {(): 1, (1,): 0.5}, {(2,): 0.25j})
    assert symbol_norm_cap(sym) == 1.75
    s = TruncatedFockSpace(2, 6)
    assert symbol_norm_surrogate(sym, s) <= symbol_norm_cap(sym) + 1e-12
    assert math.isclose(op_norm(FreePoly(LEFT, {(): 1.0}), s), 1.0)


def test_experiment_result_plain_values():
    r = ExperimentResult("x", {"a": np.int64(3)}, [{"k": 1, "v": np.float64(0.5), "c": 1 + 2j}], 0)
    d = r.to_dict()
    assert d["params"]["a"] == 3 and isinstance(d["params"]["a"], int)
    json.loads(r.to_json())

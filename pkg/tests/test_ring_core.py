from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from qdehelix.errors import DimensionError, ScalarKindError
from qdehelix.ring_core import (TruncatedPolynomial, additive_compound, compound_indices, compound_matrix,
                                exact_det, exact_inv, poly_exp, poly_log1p, poly_mul, subset_rank)

F = Fraction
TP = TruncatedPolynomial


def expm(A):
    # scaling and squaring with a Taylor core, enough for small test matrices
    s = max(0, int(np.ceil(np.log2(max(1.0, np.abs(A).sum(axis=1).max())))) + 2)
    B = A / 2 ** s
    E = np.eye(len(A), dtype=complex)
    term = np.eye(len(A), dtype=complex)
    for m in range(1, 30):
        term = term @ B / m
        E = E + term
    for _ in range(s):
        E = E @ E
    return E


def test_coeff_length_is_enforced():
    with pytest.raises(DimensionError):
        TP(3, (F(1), F(0)))


def test_mixed_kinds_rejected():
    with pytest.raises(ScalarKindError):
        TP(2, (F(1), 0.5j))
    with pytest.raises(ScalarKindError):
        TP.from_list([F(1)], 2) + TP.from_list([1j], 2)


def test_poly_mul_examples():
    a = TP.from_list([1, 1], 2)
    assert poly_mul(a, a).coeffs == (1, 2)
    n = 5
    s = TP.sigma(n)
    top = TP.from_list([0] * (n - 1) + [1], n)
    assert poly_mul(s, top).coeffs == (0,) * n
    b = TP.from_list([1, 1, 1], 3)
    assert poly_mul(b, b).coeffs == (1, 2, 3)


def test_poly_exp_examples():
    assert poly_exp(TP.from_list([0, 0, 0], 3)).coeffs == (1, 0, 0)
    assert poly_exp(TP.from_list([0, 2], 2)).coeffs == (1, 2)
    assert poly_exp(TP.sigma(3)).coeffs == (1, 1, F(1, 2))


def test_log_inverts_exp():
    a = TP.from_list([0, F(2), F(-1, 3), F(5, 7)], 4)
    e = poly_exp(a)
    assert poly_log1p(e - TP.constant(1, 4)) == a


@seed(1234)
@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=9), min_size=4, max_size=4),
       st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=9), min_size=4, max_size=4))
def test_exp_is_a_homomorphism(xs, ys):
    a = TP.from_list([0] + xs[1:], 4)
    b = TP.from_list([0] + ys[1:], 4)
    assert poly_exp(a + b) == poly_mul(poly_exp(a), poly_exp(b))


def test_compound_indices_are_ranked_lexicographically():
    for n in range(1, 7):
        for k in range(0, n + 1):
            idx = compound_indices(n, k)
            assert [ci.subset for ci in idx] == list(combinations(range(1, n + 1), k))
            assert [ci.rank for ci in idx] == list(range(1, comb(n, k) + 1))
            assert all(subset_rank(ci.subset, n) == ci.rank for ci in idx)


def test_compound_matrix_examples():
    A = np.array([[1.0, 2.0], [3.0, 5.0]])
    assert np.allclose(compound_matrix(A, 1), A)
    assert np.allclose(compound_matrix(A, 2), [[-1.0]])
    assert np.allclose(compound_matrix(np.diag([1.0, 2.0, 3.0]), 2), np.diag([2.0, 3.0, 6.0]))


def test_compound_matrix_exact():
    A = np.array([[F(1), F(2), F(0)], [F(1, 2), F(1), F(3)], [F(0), F(4), F(1)]], dtype=object)
    W = compound_matrix(A, 2)
    assert W[0, 0] == F(0)
    assert exact_det(compound_matrix(A, 3)) == exact_det(A)


def test_additive_compound_examples():
    A = np.arange(9.0).reshape(3, 3)
    assert np.allclose(additive_compound(A, 1), A)
    u = np.array([1.0 + 1j, -2.0, 0.5j])
    assert np.allclose(additive_compound(np.diag(u), 2), np.diag([u[0] + u[1], u[0] + u[2], u[1] + u[2]]))


def test_exact_inverse():
    A = np.array([[F(2), F(1)], [F(7), F(4)]], dtype=object)
    assert (A @ exact_inv(A) == np.eye(2, dtype=int)).all()


@pytest.mark.parametrize("k", [1, 2, 3])
def test_compound_of_exponential(k):
    rng = np.random.default_rng(7)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    lhs = compound_matrix(expm(A), k)
    rhs = expm(additive_compound(A, k))
    assert np.abs(lhs - rhs).max() / np.abs(rhs).max() < 1e-10


@seed(20240601)
@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=5), st.integers(min_value=0, max_value=2**31 - 1))
def test_cauchy_binet(n, s):
    rng = np.random.default_rng(s)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    for k in range(1, n + 1):
        lhs = compound_matrix(A @ B, k)
        rhs = compound_matrix(A, k) @ compound_matrix(B, k)
        assert np.abs(lhs - rhs).max() <= 1e-8 * max(1.0, np.abs(rhs).max())


@seed(99)
@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=5), st.integers(min_value=0, max_value=2**31 - 1))
def test_sylvester_franke(n, s):
    rng = np.random.default_rng(s)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    d = np.linalg.det(A)
    for k in range(1, n + 1):
        lhs = np.linalg.det(compound_matrix(A, k))
        rhs = d ** comb(n - 1, k - 1)
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))

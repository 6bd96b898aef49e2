from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from qdehelix.errors import BasisError
from qdehelix.frobenius_p import SmallQHPoint, build_system_p
from qdehelix.ktheory_gamma import (EULER_GAMMA, ZETA, ExceptionalBasis, KClass, beilinson_basis, chern_character_line,
                                    chi_pair, dubrovin_morphism, gamma_minus, graded_ch, gram_matrix, helix_connection,
                                    helix_shift, kappa, kappa_matrix, lambda_power, mutate, predicted_collection,
                                    structure_sheaf, tangent_class, todd_class)
from qdehelix.qde_engine import monodromy_data, monodromy_m0
from qdehelix.ring_core import TruncatedPolynomial, exact_det

F = Fraction
GAMMA = float(EULER_GAMMA)
ZETA2 = math.pi ** 2 / 6


def test_constants_against_mpmath():
    mpmath.mp.dps = 40
    assert abs(mpmath.mpf(EULER_GAMMA) - mpmath.euler) < mpmath.mpf(10) ** -34
    for m, v in ZETA.items():
        assert abs(mpmath.mpf(v) - mpmath.zeta(m)) < mpmath.mpf(10) ** -34
    mpmath.mp.dps = 15


def test_line_bundles():
    assert structure_sheaf(4).ch.coeffs == (1, 0, 0, 0)
    assert chern_character_line(1, 2).ch.coeffs == (1, 1)
    assert chern_character_line(2, 3).ch.coeffs == (1, 2, 2)


def test_tangent_class():
    assert tangent_class(2).ch.coeffs == (1, 2)
    for n in range(2, 9):
        T = tangent_class(n)
        assert T.rank == n - 1
        assert T.ch.coeffs[1] == n


def test_lambda_powers():
    T = tangent_class(3)
    assert lambda_power(T, 0).ch.coeffs == (1, 0, 0)
    assert lambda_power(T, 1) == T
    assert lambda_power(T, 2).ch.coeffs == (1, 3, F(9, 2))
    for n in range(2, 8):
        # the determinant of T is O(n)
        assert lambda_power(tangent_class(n), n - 1) == chern_character_line(n, n)


def test_todd():
    assert todd_class(2).coeffs == (1, 1)
    assert todd_class(3).coeffs == (1, F(3, 2), 1)
    for n in range(1, 9):
        assert todd_class(n).coeffs[n - 1] == 1


def test_chi_examples():
    O = structure_sheaf
    assert chi_pair(O(3), O(3)) == 1
    for n in range(1, 9):
        assert chi_pair(O(n), chern_character_line(1, n)) == n
    assert chi_pair(chern_character_line(1, 2), O(2)) == 0


@seed(4242)
@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=8), st.integers(min_value=-6, max_value=6),
       st.integers(min_value=-6, max_value=6))
def test_chi_of_line_bundles(n, a, b):
    # χ(O(a), O(b)) = binomial(b - a + n - 1, n - 1) as a polynomial in b - a
    k = b - a
    expected = math.prod(range(k + 1, k + n)) // math.factorial(n - 1)
    assert chi_pair(chern_character_line(a, n), chern_character_line(b, n)) == expected


def test_gram_examples():
    assert gram_matrix(beilinson_basis(2)).tolist() == [[1, 2], [0, 1]]
    assert gram_matrix(beilinson_basis(3)).tolist() == [[1, 3, 6], [0, 1, 3], [0, 0, 1]]
    for n in range(2, 7):
        G = gram_matrix(predicted_collection(n))
        assert all(G[i, i] == 1 for i in range(n))


def test_non_exceptional_rejected():
    O = chern_character_line
    with pytest.raises(BasisError):
        ExceptionalBasis([O(1, 2), O(0, 2)])


def test_gamma_examples():
    g = gamma_minus(2).gamma_minus.coeffs
    assert abs(g[0] - 1) < 1e-15 and abs(g[1] - 2 * GAMMA) < 1e-15
    g = gamma_minus(3).gamma_minus.coeffs
    assert abs(g[1] - 3 * GAMMA) < 1e-15
    assert abs(g[2] - (9 * GAMMA ** 2 / 2 + 3 * ZETA2 / 2)) < 1e-14
    assert all(abs(gamma_minus(n).gamma_minus.coeffs[0] - 1) < 1e-15 for n in range(1, 9))


def test_graded_ch():
    assert graded_ch(structure_sheaf(3)).coeffs == (1, 0, 0)
    c = graded_ch(chern_character_line(1, 2)).coeffs
    assert abs(c[1] - 2j * math.pi) < 1e-15
    x, y = chern_character_line(2, 4), tangent_class(4)
    s = graded_ch(x + y).coeffs
    assert np.allclose(s, np.add(graded_ch(x).coeffs, graded_ch(y).coeffs))


def test_dubrovin_p1():
    D = dubrovin_morphism([structure_sheaf(2)])
    pref = 1j / math.sqrt(2 * math.pi)
    assert np.allclose(D[:, 0], [pref, pref * (2 * GAMMA - 2j * math.pi)], atol=1e-15)
    for n in range(2, 7):
        assert abs(np.linalg.det(dubrovin_morphism(predicted_collection(n)))) > 1e-8


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_dubrovin_reproduces_const2(n):
    # S = Gram^{-1} with C = Д⁻ satisfies the second constraint exactly
    from qdehelix.qde_engine import MonodromyData, verify_constraints
    from qdehelix.ring_core import exact_inv
    B = predicted_collection(n)
    s = build_system_p(SmallQHPoint(n, 0.0))
    S = np.array(exact_inv(B.gram), dtype=complex)
    d = MonodromyData(s.mu, s.R, S, dubrovin_morphism(B), 0.0, np.arange(n), (1,) * n, eta=s.eta)
    r = verify_constraints(d)
    assert r["const2"] < 1e-10 and r["const1"] < 1e-10


def test_mutations():
    O = chern_character_line
    b = beilinson_basis(2)
    L = mutate(b, 1, "left")
    assert L.classes[0].ch == (O(1, 2) - 2 * O(0, 2)).ch
    assert L.classes[1].ch == O(0, 2).ch
    for n in (3, 4):
        B = predicted_collection(n)
        for i in range(1, n):
            assert mutate(mutate(B, i, "left"), i, "right") == B
            assert mutate(mutate(B, i, "right"), i, "left") == B


@pytest.mark.parametrize("n", [3, 4, 5])
def test_mutation_braid_relation(n):
    B = beilinson_basis(n)
    for i in range(1, n - 1):
        a = mutate(mutate(mutate(B, i + 1), i), i + 1)
        b = mutate(mutate(mutate(B, i), i + 1), i)
        assert [c.ch for c in a.classes] == [c.ch for c in b.classes]


def test_kappa():
    x = chern_character_line(3, 2)
    assert kappa(x).ch == (-chern_character_line(1, 2)).ch
    for n in range(1, 9):
        assert abs(exact_det(kappa_matrix(n))) == 1


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_kappa_intertwines_m0(n):
    s = build_system_p(SmallQHPoint(n, 0.0))
    M0 = monodromy_m0(s.mu, s.R)
    B = predicted_collection(n)
    D = dubrovin_morphism(B)
    K = np.array(kappa_matrix(n, B), dtype=float)
    lhs = np.linalg.solve(M0, D)
    assert np.abs(lhs - D @ K).max() < 1e-8


def test_helix_connection():
    s = build_system_p(SmallQHPoint(2, 0.0))
    M0 = monodromy_m0(s.mu, s.R)
    C = np.array([[1.0, 2.0], [3.0, -1.0]], dtype=complex)
    assert np.array_equal(helix_connection(C, M0, 0), C)
    assert np.allclose(helix_connection(helix_connection(C, M0, 1), M0, 1), helix_connection(C, M0, 2))
    assert np.allclose(helix_connection(helix_connection(C, M0, 1), M0, -1), C)
    d0 = monodromy_data(SmallQHPoint(2, 0.0), math.pi / 4)
    d1 = monodromy_data(SmallQHPoint(2, 0.0), math.pi / 4 + 2 * math.pi)
    assert np.abs(helix_connection(d0.C, M0, 1) - d1.C).max() < 1e-8


def test_helix_shift_matches_kappa():
    B = predicted_collection(3)
    H = helix_shift(B, 1)
    assert [c.ch for c in H.classes] == [kappa(c).ch for c in B.classes]
    assert helix_shift(helix_shift(B, 2), -2).classes == B.classes
    assert (H.gram == B.gram).all()


def test_predicted_collections():
    assert predicted_collection(2).labels == ["O(1)", "T"]
    assert predicted_collection(3).labels == ["O(1)", "O(2)", "∧^2T"]
    assert predicted_collection(4).labels == ["O(2)", "T(1)", "O(3)", "∧^3T"]
    T4 = tangent_class(4)
    assert predicted_collection(4).classes[1].ch == T4.twist(1).ch
    for n in range(2, 9):
        predicted_collection(n)


def test_kclass_arithmetic():
    a, b = chern_character_line(1, 3), tangent_class(3)
    assert (a + b - b).ch == a.ch
    assert (-a).ch == (-1 * a).ch
    assert (a * b).ch == b.twist(1).ch
    assert a.dual().ch == chern_character_line(-1, 3).ch
    with pytest.raises(Exception):
        KClass(2, TruncatedPolynomial(2, (F(1, 2), F(0))))

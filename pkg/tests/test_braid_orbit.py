from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from qdehelix.braid_orbit import (BraidWord, a_inverse, a_matrix, braid_act, braid_words, mutate_word,
                                  mutation_consistency, orbit_match)
from qdehelix.errors import ArgumentError, NotFoundError
from qdehelix.frobenius_p import SmallQHPoint
from qdehelix.ktheory_gamma import beilinson_basis, dubrovin_morphism, predicted_collection
from qdehelix.qde_engine import monodromy_data
from qdehelix.ring_core import exact_det, exact_inv

F = Fraction
fractions = st.fractions(min_value=-6, max_value=6, max_denominator=5)


@st.composite
def unitriangular(draw, n_min=3, n_max=5):
    n = draw(st.integers(min_value=n_min, max_value=n_max))
    S = np.zeros((n, n), dtype=object)
    S[...] = F(0)
    for i in range(n):
        S[i, i] = F(1)
        for j in range(i + 1, n):
            S[i, j] = draw(fractions)
    return S


@st.composite
def words(draw, n, max_len=6):
    k = draw(st.integers(min_value=0, max_value=max_len))
    return BraidWord(tuple((draw(st.integers(1, n - 1)), draw(st.sampled_from((1, -1)))) for _ in range(k)))


def test_word_parse_and_print():
    w = BraidWord(((2, 1), (1, -1), (3, 1)))
    assert str(w) == "b2 b1^-1 b3"
    assert BraidWord.parse(str(w)) == w
    assert BraidWord.parse("id") == BraidWord()
    assert w.inverse() + w != BraidWord()
    assert (w + w.inverse()).letters[:3] == w.letters
    with pytest.raises(ArgumentError):
        BraidWord(((0, 1),))
    with pytest.raises(ArgumentError):
        BraidWord(((3, 1),)).check(3)


def test_a_matrix_example():
    s = F(7, 3)
    U = np.array([[F(1), s], [F(0), F(1)]], dtype=object)
    assert a_matrix(U, 1).tolist() == [[0, 1], [1, -s]]
    P = a_matrix(np.eye(3, dtype=object) * F(1), 2)
    assert ((P @ P) == np.eye(3, dtype=int)).all()


@seed(555)
@settings(max_examples=30, deadline=None)
@given(unitriangular())
def test_a_matrix_det_and_inverse(S):
    n = S.shape[0]
    for i in range(1, n):
        A = a_matrix(S, i)
        assert exact_det(A) == -1
        assert ((A @ a_inverse(A @ S @ A, i)) == np.eye(n, dtype=int)).all()


def test_braid_act_examples():
    s = F(5)
    S = np.array([[F(1), s], [F(0), F(1)]], dtype=object)
    S1, _ = braid_act(S, None, BraidWord(((1, 1),)))
    assert S1.tolist() == [[1, -s], [0, 1]]
    C = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex)
    S0, C0 = braid_act(S, C, BraidWord())
    assert (S0 == S).all() and np.array_equal(C0, C)


@seed(2718)
@settings(max_examples=100, deadline=None)
@given(unitriangular())
def test_braid_relations(S):
    n = S.shape[0]
    for i in range(1, n - 1):
        a, _ = braid_act(S, None, BraidWord(((i, 1), (i + 1, 1), (i, 1))))
        b, _ = braid_act(S, None, BraidWord(((i + 1, 1), (i, 1), (i + 1, 1))))
        assert (a == b).all()
    for i in range(1, n - 2):
        for j in range(i + 2, n):
            a, _ = braid_act(S, None, BraidWord(((i, 1), (j, 1))))
            b, _ = braid_act(S, None, BraidWord(((j, 1), (i, 1))))
            assert (a == b).all()


@seed(1618)
@settings(max_examples=50, deadline=None)
@given(unitriangular(), st.data())
def test_inverse_word_restores(S, data):
    n = S.shape[0]
    w = data.draw(words(n))
    C = exact_inv(S.T)
    S1, C1 = braid_act(S, C, w)
    S2, C2 = braid_act(S1, C1, w.inverse())
    assert (S2 == S).all()
    assert (C2 == C).all()


def test_mutation_consistency_examples():
    assert mutation_consistency(beilinson_basis(3), BraidWord()) == 0
    assert mutation_consistency(beilinson_basis(3), BraidWord(((1, 1),))) == 0


@seed(314159)
@settings(max_examples=100, deadline=None)
@given(st.data())
def test_mutation_consistency_property(data):
    w = data.draw(words(4))
    assert mutation_consistency(beilinson_basis(4), w) == 0


def test_braid_act_on_c_matches_mutation():
    B = predicted_collection(3)
    w = BraidWord(((2, 1), (1, -1)))
    S = exact_inv(B.gram)
    _, C1 = braid_act(S, dubrovin_morphism(B), w)
    assert np.abs(C1 - dubrovin_morphism(mutate_word(B, w))).max() < 1e-10


def test_words_enumeration():
    ws = list(braid_words(3, 2))
    assert ws[0] == BraidWord()
    assert len(ws) == 1 + 4 + 4 * 3
    assert all(len(a) <= len(b) for a, b in zip(ws, ws[1:]))


def test_orbit_identity_match():
    B = predicted_collection(3)
    S = np.array(exact_inv(B.gram), dtype=complex)
    m = orbit_match(S, dubrovin_morphism(B), B, depth=0)
    assert m.word == BraidWord() and m.residual < 1e-12 and m.signs == (1, 1, 1)


def test_orbit_recovers_word_and_signs():
    B = predicted_collection(4)
    w = BraidWord(((2, 1), (1, -1)))
    target = mutate_word(B, w)
    D = np.diag([1, -1, -1, 1])
    S = D @ np.array(exact_inv(target.gram), dtype=float) @ D
    C = dubrovin_morphism(target) @ D
    m = orbit_match(S, C, B, depth=3)
    assert m.residual < 1e-10
    assert mutate_word(B, m.word).gram.tolist() == target.gram.tolist()
    assert m.signs in ((1, -1, -1, 1), (-1, 1, 1, -1))


def test_orbit_p1_pipeline():
    d = monodromy_data(SmallQHPoint(2, 0.0), math.pi / 4)
    m = orbit_match(d.S, d.C, predicted_collection(2), depth=2)
    assert len(m.word) <= 2 and m.residual < 1e-6


def test_orbit_corrupted_input():
    d = monodromy_data(SmallQHPoint(3, 0.0), math.pi / 6)
    C = d.C.copy()
    C[0, 0] += 0.5
    with pytest.raises(NotFoundError) as info:
        orbit_match(d.S, C, predicted_collection(3), depth=2)
    assert info.value.best_residual > 1e-2


def test_orbit_helix_shift():
    from qdehelix.frobenius_p import build_system_p
    from qdehelix.qde_engine import monodromy_m0
    s = build_system_p(SmallQHPoint(3, 0.0))
    M0 = monodromy_m0(s.mu, s.R)
    B = predicted_collection(3)
    S = np.array(exact_inv(B.gram), dtype=complex)
    C = np.linalg.solve(M0, dubrovin_morphism(B))
    m = orbit_match(S, C, B, depth=0)
    assert m.helix_shift == 1

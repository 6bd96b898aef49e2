from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from qdehelix.errors import AdmissibilityError
from qdehelix.frobenius_p import (SmallQHPoint, build_system_p, canonical_coordinates, default_direction,
                                  frame_matrix, is_admissible, lex_order, psi_matrix,
                                  raw_canonical_coordinates, require_admissible, stokes_rays)
from qdehelix.precision import get_backend


def test_p1_system():
    s = build_system_p(SmallQHPoint(2, 0.0))
    assert np.allclose(s.U, [[0, 2], [2, 0]])
    assert np.allclose(s.Cmat, s.U / 2)
    assert [s.mu[i, i] for i in range(2)] == [Fraction(-1, 2), Fraction(1, 2)]
    assert np.array_equal(np.array(s.R, dtype=int), [[0, 0], [2, 0]])


@pytest.mark.parametrize("n", range(1, 9))
def test_system_shapes_and_invariants(n):
    t = 0.3 - 0.2j
    s = build_system_p(SmallQHPoint(n, t))
    mu = np.array([float(s.mu[i, i]) for i in range(n)])
    assert np.allclose(mu, [k - (n - 1) / 2 for k in range(n)])
    assert abs(mu.sum()) == 0
    assert np.allclose(np.asarray(s.Cmat, dtype=complex) * n, s.U)
    R = np.array(s.R, dtype=int)
    for a in range(n):
        for b in range(n):
            if R[a, b]:
                assert a > b and mu[a] - mu[b] == 1
    eta = np.array(s.eta, dtype=int)
    assert all(eta[a, b] == (1 if a + b == n - 1 else 0) for a in range(n) for b in range(n))
    # nq in the upper-right corner, n on the subdiagonal
    if n > 1:
        assert np.isclose(s.U[0, n - 1], n * np.exp(t))
        assert np.allclose(np.diag(s.U, -1), n)


def test_p2_mu():
    s = build_system_p(SmallQHPoint(3, 0.0))
    assert [s.mu[i, i] for i in range(3)] == [-1, 0, 1]


def test_canonical_coordinate_examples():
    u = raw_canonical_coordinates(SmallQHPoint(2, 0.0))
    assert sorted(np.round(u.real, 12)) == [-2, 2]
    u = raw_canonical_coordinates(SmallQHPoint(3, 0.0))
    ref = [3, 3 * cmath.exp(2j * math.pi / 3), 3 * cmath.exp(-2j * math.pi / 3)]
    assert all(min(abs(x - r) for x in u) < 1e-12 for r in ref)
    u = raw_canonical_coordinates(SmallQHPoint(2, 2 * math.log(2)))
    assert sorted(np.round(u.real, 12)) == [-4, 4]


def test_canonical_coordinates_are_eigenvalues():
    for n in range(2, 7):
        p = SmallQHPoint(n, 0.4 + 0.1j)
        u = raw_canonical_coordinates(p)
        ev = np.linalg.eigvals(build_system_p(p).U)
        assert all(np.abs(ev - x).min() < 1e-10 for x in u)


def test_psi_examples():
    assert np.allclose(psi_matrix(SmallQHPoint(1, 0.0)), [[1]])
    f = frame_matrix(SmallQHPoint(2, 0.0), (1, 1))
    assert np.allclose(f[:, 0], np.array([1, 1]) / math.sqrt(2))
    assert np.allclose(f[:, 1], np.array([-1j, 1j]) / math.sqrt(2))


@pytest.mark.parametrize("n", range(1, 7))
def test_psi_orthonormal(n):
    p = SmallQHPoint(n, 0.0)
    Psi = psi_matrix(p)
    eta = np.array(build_system_p(p).eta, dtype=float)
    assert np.abs(Psi.T @ Psi - eta).max() < 1e-12


@pytest.mark.parametrize("n", [2, 3, 5])
def test_psi_diagonalizes_u(n):
    p = SmallQHPoint(n, 0.2)
    Psi = psi_matrix(p, [(-1) ** j for j in range(n)])
    U = build_system_p(p).U
    D = Psi @ U @ np.linalg.inv(Psi)
    u = raw_canonical_coordinates(p)
    assert np.allclose(D, np.diag(u), atol=1e-10)


def test_psi_extended_precision():
    be = get_backend("mp:30")
    p = SmallQHPoint(3, 0.0)
    Psi = psi_matrix(p, None, be)
    eta = np.array(build_system_p(p).eta, dtype=float)
    err = max(abs(complex(x)) for x in (Psi.T @ Psi - eta).flat)
    assert err < 1e-25


def test_stokes_rays_p1():
    rays = stokes_rays([2, -2])
    by_pair = {r.pair: r.phi for r in rays}
    assert math.isclose(by_pair[(1, 2)], 3 * math.pi / 2)
    assert math.isclose(by_pair[(2, 1)], math.pi / 2)
    assert stokes_rays([1.0]) == set()


def test_opposite_rays():
    u = raw_canonical_coordinates(SmallQHPoint(4, 0.3))
    dirs = [r.phi for r in stokes_rays(u)]
    for a in dirs:
        assert min(abs(cmath.exp(1j * b) + cmath.exp(1j * a)) for b in dirs) < 1e-12


def test_admissibility_examples():
    u = raw_canonical_coordinates(SmallQHPoint(2, 0.0))
    assert is_admissible(0.1, u)
    assert not is_admissible(math.pi / 2, u)
    assert is_admissible(math.pi / 2, [5.0])
    with pytest.raises(AdmissibilityError):
        require_admissible(math.pi / 2, u)


def test_lex_order():
    assert list(lex_order(0.3, [1.0])) == [0]
    u = raw_canonical_coordinates(SmallQHPoint(4, 0.0))
    a = lex_order(0.2, u)
    b = lex_order(0.2 + math.pi, u)
    assert list(b) == list(a[::-1])
    with pytest.raises(AdmissibilityError):
        lex_order(math.pi / 2, raw_canonical_coordinates(SmallQHPoint(2, 0.0)))


def test_canonical_coordinates_sorted():
    p = SmallQHPoint(5, 0.0)
    u, perm = canonical_coordinates(p, math.pi / 10)
    keys = (np.exp(1j * math.pi / 10) * np.asarray(u, dtype=complex)).real
    assert np.all(np.diff(keys) > 0)


def test_default_direction():
    u = raw_canonical_coordinates(SmallQHPoint(3, 0.0))
    assert default_direction(u, 0.3) == 0.3
    phi = default_direction(u, math.pi / 3)
    assert is_admissible(phi, u, 1e-3)

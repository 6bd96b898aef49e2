from __future__ import annotations

import cmath
import math
from math import comb

import numpy as np
import pytest

from qdehelix.errors import AdmissibilityError, DimensionError
from qdehelix.frobenius_p import SmallQHPoint, build_system_p, raw_canonical_coordinates
from qdehelix.ring_core import compound_matrix
from qdehelix.satake_g import (ShiftedPoint, grassmannian_direct, grassmannian_levelt, grassmannian_monodromy,
                               metric_wedge_check, quantum_pieri_matrix, satake_matrices, schubert_basis,
                               wedge_solution)


def test_schubert_labels():
    assert schubert_basis(1, 4).labels == ((0,), (1,), (2,), (3,))
    G = schubert_basis(2, 4)
    assert set(G.labels) == {(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)}
    for k, n in [(2, 5), (3, 6), (2, 7)]:
        G = schubert_basis(k, n)
        assert G.N == comb(n, k)
        assert all(all(n - k >= x >= 0 for x in lab) for lab in G.labels)
        assert all(list(lab) == sorted(lab, reverse=True) for lab in G.labels)
    with pytest.raises(DimensionError):
        schubert_basis(4, 4)


def test_poincare_pairing():
    G = schubert_basis(2, 4)
    assert G.eta_G[G.index((0, 0)), G.index((2, 2))] == 1
    for k, n in [(2, 4), (2, 5), (3, 6)]:
        G = schubert_basis(k, n)
        assert (G.eta_G == G.eta_G.T).all()
        assert (G.eta_G.sum(axis=0) == 1).all()


def test_metric_wedge():
    assert metric_wedge_check(1, 5) == 0
    assert metric_wedge_check(2, 4) == 0
    assert metric_wedge_check(3, 6) == 0


def test_pieri_classical():
    G = schubert_basis(2, 4)
    M = quantum_pieri_matrix(2, 4, 0)
    assert M[G.index((1, 0)), G.index((0, 0))] == 1
    col = M[:, G.index((1, 0))]
    assert {G.labels[i] for i in range(G.N) if col[i] != 0} == {(2, 0), (1, 1)}
    assert all(col[i] in (0, 1) for i in range(G.N))


@pytest.mark.parametrize("k,n", [(2, 4), (2, 5), (3, 6)])
def test_pieri_quantum_spectrum(k, n):
    M = np.array(quantum_pieri_matrix(k, n, 1.0), dtype=complex)
    uP = raw_canonical_coordinates(SmallQHPoint(n, 1j * math.pi * (k - 1))) / n
    sums = [sum(uP[i - 1] for i in s) for s in schubert_basis(k, n).subsets]
    ev = np.linalg.eigvals(M)
    assert all(np.abs(ev - s).min() < 1e-8 for s in sums)


def test_satake_reduces_to_p():
    sm = satake_matrices(1, 4, 0.3)
    s = build_system_p(SmallQHPoint(4, 0.3))
    assert np.allclose(sm.U_G, s.U)
    assert np.allclose(np.asarray(sm.mu_G, dtype=complex), np.asarray(s.mu, dtype=complex))


def test_satake_spectrum_and_trace():
    sm = satake_matrices(2, 4, 0.0)
    uP = raw_canonical_coordinates(SmallQHPoint(4, 1j * math.pi))
    sums = [uP[i] + uP[j] for i in range(4) for j in range(i + 1, 4)]
    ev = np.linalg.eigvals(sm.U_G)
    assert all(np.abs(ev - s).min() < 1e-10 for s in sums)
    for k, n in [(2, 4), (2, 5), (3, 6)]:
        mu = satake_matrices(k, n, 0.0).mu_G
        assert sum(mu[i, i] for i in range(mu.shape[0])) == 0


def test_shifted_point():
    assert ShiftedPoint(2, 0.5).t_hat == 0.5 + 1j * math.pi
    assert ShiftedPoint(1, 0.5).t_hat == 0.5


def test_wedge_solution():
    rng = np.random.default_rng(0)
    Z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert np.allclose(wedge_solution(Z, 1), Z)
    d = np.linalg.det(Z)
    W = wedge_solution(Z, 2)
    assert abs(np.linalg.det(W) - d ** comb(3, 1)) < 1e-8 * abs(d) ** 3


def test_wedge_solves_grassmannian_equation():
    # ∧²Z_P(t̂) e^{-πiσ₁} solves Z' = (U_G + μ_G/z) Z at |z| = 1
    k, n = 2, 4
    sm = satake_matrices(k, n, 0.0)
    ztop = grassmannian_levelt(k, n, 0.0)
    z0, h = cmath.exp(0.7j), 1e-3
    Z0 = ztop(z0, 0.7)
    # five-point stencil
    dZ = (ztop(z0 - 2 * h, 0.7) - 8 * ztop(z0 - h, 0.7) + 8 * ztop(z0 + h, 0.7) - ztop(z0 + 2 * h, 0.7)) / (12 * h)
    A = sm.U_G + np.asarray(sm.mu_G, dtype=complex) / z0
    assert np.abs(dZ - A @ Z0).max() / np.abs(A @ Z0).max() < 1e-8


def test_grassmannian_monodromy_g24():
    res = grassmannian_monodromy(2, 4, 0.0, math.pi / 8)
    S = res.monodromy.S
    assert np.abs(np.tril(S, -1)).max() < 1e-7
    assert np.abs(np.diag(S) - 1).max() < 1e-7
    assert max(res.monodromy.residuals.values()) < 1e-7
    # inverse of the compound is the compound of the inverse
    Sinv = np.linalg.inv(S)
    assert np.abs(Sinv - compound_matrix(np.linalg.inv(res.projective.S), 2)).max() < 1e-9


def test_direct_agrees_with_compound_g24():
    a = grassmannian_monodromy(2, 4, 0.0, math.pi / 8).monodromy
    b = grassmannian_direct(2, 4, 0.0, math.pi / 8).monodromy
    assert np.abs(a.S - b.S).max() < 1e-6
    assert np.abs(a.C - b.C).max() < 1e-6
    assert max(b.residuals.values()) < 1e-7


def test_grassmannian_ray_rejected():
    with pytest.raises(AdmissibilityError):
        grassmannian_monodromy(2, 5, 0.0, math.pi / 10)

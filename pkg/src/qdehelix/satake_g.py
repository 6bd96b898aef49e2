"""Grassmannians G(k, n) through exterior powers of the projective-space data.

The basis ``σ^{ν₁}∧…∧σ^{ν_k}`` of ``∧^k H•(P^{n-1})`` is identified with the
Schubert basis ``σ_ν̃`` of ``H•(G(k,n))``, ``ν̃_a = ν_a - (k - a)``. All
matrices are indexed by k-subsets in lexicographic (compound) order. The
Grassmannian point ``t`` corresponds to ``t̂ = t + πi(k-1)`` on the
projective side.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .errors import AdmissibilityError, DimensionError, OracleDisagreementError
from .frobenius_p import (SmallQHPoint, build_system_p, canonical_coordinates, eta_matrix, psi_matrix,
                          raw_canonical_coordinates)
from .precision import Backend, get_backend
from .qde_engine.integrate import IntegratorConfig
from .qde_engine.levelt import evaluate_levelt, levelt_factors, topological_solution, z_power
from .qde_engine.monodromy import (MonodromyData, _q_order_for, levelt_tail_tol, monodromy_data,
                                   solve_monodromy, verify_constraints)
from .ring_core import additive_compound, compound_indices, compound_matrix


@dataclass(frozen=True)
class ShiftedPoint:
    """Grassmannian coordinate ``t`` and the projective coordinate ``t̂``."""

    k: int
    t: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "t", complex(self.t))

    @property
    def t_hat(self) -> complex:
        return self.t + 1j * math.pi * (self.k - 1)


@dataclass(frozen=True)
class GrassmannianData:
    k: int
    n: int
    labels: tuple
    subsets: tuple
    eta_G: np.ndarray = field(compare=False)

    @property
    def N(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.k * (self.n - self.k)

    def index(self, label) -> int:
        return self.labels.index(tuple(label))


def _check_kn(k: int, n: int):
    if not 1 <= k < n:
        raise DimensionError(f"need 1 <= k < n, got k={k}, n={n}")


def subset_label(subset, k: int) -> tuple:
    """Increasing 1-based subset → partition ν̃ (exponents are subset entries minus one)."""
    nu = sorted((i - 1 for i in subset), reverse=True)
    return tuple(nu[a] - (k - 1 - a) for a in range(k))


def schubert_basis(k: int, n: int) -> GrassmannianData:
    """Schubert labels in compound-rank order together with the Poincaré pairing."""
    _check_kn(k, n)
    subs = tuple(ci.subset for ci in compound_indices(n, k))
    labels = tuple(subset_label(s, k) for s in subs)
    N = len(labels)
    eta = np.zeros((N, N), dtype=int)
    for a, lam in enumerate(labels):
        for b, mu in enumerate(labels):
            if all(lam[i] + mu[k - 1 - i] == n - k for i in range(k)):
                eta[a, b] = 1
    return GrassmannianData(k, n, labels, subs, eta)


def quantum_pieri_matrix(k: int, n: int, q=0, validate: bool = True) -> np.ndarray:
    """Matrix of ``σ₁ ∗`` on the Schubert basis; column λ holds the expansion of ``σ₁ ∗ σ_λ``.

    Classical Pieri adds a box inside the ``k × (n-k)`` rectangle; when
    ``λ₁ = n-k`` and ``λ_k ≥ 1`` a term ``q·σ_{(λ₂-1, …, λ_k-1, 0)}`` is added.
    With ``validate`` the spectrum is compared with the additive-compound
    construction and an OracleDisagreementError is raised on mismatch.
    """
    G = schubert_basis(k, n)
    exact = isinstance(q, (int, Fraction))
    M = np.zeros((G.N, G.N), dtype=object if exact else complex)
    if exact:
        M[...] = Fraction(0)
    pos = {lab: i for i, lab in enumerate(G.labels)}
    for j, lam in enumerate(G.labels):
        for a in range(k):
            new = list(lam)
            new[a] += 1
            if new[a] <= n - k and (a == 0 or new[a] <= lam[a - 1]):
                M[pos[tuple(new)], j] += 1
        if lam[0] == n - k and lam[k - 1] >= 1:
            low = tuple(x - 1 for x in lam[1:]) + (0,)
            M[pos[low], j] += q
    if validate and q != 0:
        qc = complex(q)
        t = cmath.log(qc)
        ref = additive_compound(build_system_p(SmallQHPoint(n, t + 1j * math.pi * (k - 1))).Cmat, k)
        ev1 = np.sort_complex(np.round(np.linalg.eigvals(np.array(M, dtype=complex)), 10))
        ev2 = np.sort_complex(np.round(np.linalg.eigvals(ref), 10))
        if np.abs(ev1 - ev2).max() > 1e-8 * max(1.0, np.abs(ev2).max()):
            raise OracleDisagreementError(
                f"quantum Pieri spectrum disagrees with the compound construction by {np.abs(ev1 - ev2).max():.3g}")
    return M


def sigma1_cup(k: int, n: int) -> np.ndarray:
    """Classical ``σ₁ ∪`` on the Schubert basis (integer matrix)."""
    return np.array(quantum_pieri_matrix(k, n, 0, validate=False), dtype=int)


def metric_wedge_check(k: int, n: int) -> int:
    """Max |(-1)^{C(k,2)} ∧^k η_P - η_G| in exact arithmetic."""
    G = schubert_basis(k, n)
    W = compound_matrix(np.array(eta_matrix(n), dtype=object), k)
    sign = (-1) ** comb(k, 2)
    return int(max(abs(sign * int(a) - int(b)) for a, b in zip(W.flat, G.eta_G.flat)))


def _i_power(m: int) -> complex:
    return [1, 1j, -1, -1j][m % 4]


@dataclass
class SatakeMatrices:
    U_G: np.ndarray
    mu_G: np.ndarray
    Psi_G: np.ndarray
    u_G: np.ndarray
    perm_P: np.ndarray
    t_hat: complex
    mu_shift: float


def satake_matrices(k: int, n: int, t=0.0, phi: float | None = None, signs=None,
                    backend: Backend | None = None) -> SatakeMatrices:
    """``U_G``, ``μ_G`` and ``Ψ_G`` from the projective data at ``t̂``.

    With ``phi`` given, the projective canonical coordinates are first put
    in ℓ-lexicographic order; the rows of ``Ψ_G`` and the entries of ``u_G``
    then follow compound ranks of that ordering. Without ``phi`` the formula
    order ``h = 1..n`` is used.
    """
    _check_kn(k, n)
    be = backend or get_backend()
    sp = ShiftedPoint(k, t)
    pP = SmallQHPoint(n, sp.t_hat)
    sysP = build_system_p(pP, be)
    if phi is None:
        perm = np.arange(n)
    else:
        _, perm = canonical_coordinates(pP, phi, be)
    uP = raw_canonical_coordinates(pP, be)[perm]
    PsiP = psi_matrix(pP, signs, be)[perm]
    U_G = additive_compound(sysP.U, k)
    mu_G = additive_compound(be.asarray(sysP.mu), k)
    N = mu_G.shape[0]
    shift = sum(mu_G[i, i] for i in range(N)) / N
    for i in range(N):
        mu_G[i, i] = mu_G[i, i] - shift
    Psi_G = compound_matrix(PsiP, k) * _i_power(comb(k, 2))
    u_G = np.array([sum(uP[i - 1] for i in ci.subset) for ci in compound_indices(n, k)],
                   dtype=object if be.is_mp else complex)
    return SatakeMatrices(U_G, mu_G, Psi_G, u_G, np.asarray(perm), sp.t_hat, float(abs(complex(shift))))


def wedge_solution(Z_P, k: int) -> np.ndarray:
    """``∧^k Z_P`` (matrix of k×k minors in compound order)."""
    return compound_matrix(Z_P, k)


def grassmannian_levelt(k: int, n: int, t=0.0, backend: Backend | None = None, radius: float = 1.0,
                        factored: bool = False):
    """Evaluator ``(z, arg) ↦ ∧^k Z_top^P(t̂, z) · exp(-πi(k-1)σ₁∪)``.

    With ``factored`` the evaluator returns ``(head, tail_inv)`` as accepted
    by ``central_connection``.
    """
    be = backend or get_backend()
    sp = ShiftedPoint(k, t)
    pP = SmallQHPoint(n, sp.t_hat)
    lev = topological_solution(pP, q_order=_q_order_for(n, radius, abs(pP.q), be), radius=radius,
                               backend=be, tail_tol=levelt_tail_tol(be))
    E = z_power(sigma1_cup(k, n), -1j * be.pi * (k - 1), be)

    def ztop(z, arg):
        return compound_matrix(evaluate_levelt(lev, z, arg), k) @ E

    def ztop_factors(z, arg):
        head, tail_inv = levelt_factors(lev, z, arg)
        return compound_matrix(head, k), E_inv @ compound_matrix(tail_inv, k)

    if factored:
        E_inv = z_power(sigma1_cup(k, n), 1j * be.pi * (k - 1), be)
        return ztop_factors
    return ztop


def admissible_g(phi: float, u, tol: float = 1e-9) -> None:
    """Admissibility ignoring coalescing pairs (their Stokes rays are undefined)."""
    uc = [complex(x) for x in u]
    scale = max(1.0, max(abs(x) for x in uc))
    for i in range(len(uc)):
        for j in range(len(uc)):
            if i == j or abs(uc[i] - uc[j]) <= 1e-10 * scale:
                continue
            w = -1j * (uc[i] - uc[j]).conjugate()
            d = (cmath.phase(w) - phi) % (2 * math.pi)
            if min(d, 2 * math.pi - d) <= tol:
                raise AdmissibilityError(f"phi={phi:.12g} is on the Stokes ray R_{i + 1}{j + 1} of G",
                                         ray=(i + 1, j + 1))


def _e_sigma(k, n, be, sign=1):
    return z_power(sigma1_cup(k, n), sign * 1j * be.pi * (k - 1), be)


@dataclass
class GrassmannianResult:
    data: GrassmannianData
    monodromy: MonodromyData
    projective: MonodromyData | None = None
    route: str = "compound"
    extra: dict = field(default_factory=dict)


def grassmannian_monodromy(k: int, n: int, t=0.0, phi: float = 0.1, cfg: IntegratorConfig | None = None,
                           signs=None, backend: Backend | None = None, q_order: int | None = None,
                           z_order: int | None = None) -> GrassmannianResult:
    """``S^G = ∧^k S^P(t̂)`` and ``C^G = i^{-C(k,2)} e^{πi(k-1)σ₁∪} ∧^k C^P(t̂)``."""
    _check_kn(k, n)
    be = backend or get_backend()
    G = schubert_basis(k, n)
    sp = ShiftedPoint(k, t)
    pP = SmallQHPoint(n, sp.t_hat)
    admissible_g(phi, [complex(x) for x in satake_matrices(k, n, t, None, backend=be).u_G])
    dP = monodromy_data(pP, phi, signs, cfg, be, q_order=q_order, z_order=z_order)
    if dP.diagnostics.get("order_reversed"):
        raise AdmissibilityError("projective lexicographic order had to be reversed; compound bookkeeping "
                                 "assumes the validated ascending order")
    S_G = compound_matrix(dP.S, k)
    C_G = _i_power(-comb(k, 2)) * (_e_sigma(k, n, be) @ compound_matrix(dP.C, k))
    sm = satake_matrices(k, n, t, phi, signs, be)
    data = MonodromyData(sm.mu_G, _c1_G(k, n), S_G, C_G, float(phi), dP.order_permutation,
                         dP.psi_signs, eta=G.eta_G, u=sm.u_G, diagnostics={"route": "compound"})
    data.residuals = verify_constraints(data, G.eta_G, be)
    return GrassmannianResult(G, data, dP, "compound")


def _c1_G(k: int, n: int) -> np.ndarray:
    return n * sigma1_cup(k, n)


def grassmannian_direct(k: int, n: int, t=0.0, phi: float = 0.1, cfg: IntegratorConfig | None = None,
                        signs=None, backend: Backend | None = None) -> GrassmannianResult:
    """Run the Stokes pipeline directly on ``(U_G, μ_G, Ψ_G)``.

    The topological solution is the compound one; ordering follows the
    compound ranks of the ordered projective coordinates.
    """
    _check_kn(k, n)
    be = backend or get_backend()
    G = schubert_basis(k, n)
    sm = satake_matrices(k, n, t, phi, signs, be)
    admissible_g(phi, [complex(x) for x in sm.u_G])
    ztop = grassmannian_levelt(k, n, t, be, radius=(cfg or IntegratorConfig()).base_radius, factored=True)
    S, C, perm, run, diag = solve_monodromy(sm.U_G, sm.mu_G, sm.Psi_G, sm.u_G, phi, ztop, cfg, be,
                                            perm=np.arange(len(sm.u_G)))
    diag["route"] = "direct"
    data = MonodromyData(sm.mu_G, _c1_G(k, n), S, C, float(phi), perm,
                         tuple([1] * n if signs is None else signs), eta=G.eta_G, u=sm.u_G[perm],
                         diagnostics=diag)
    data.residuals = verify_constraints(data, G.eta_G, be)
    return GrassmannianResult(G, data, None, "direct")


def gram_wedge_identity(gram_P, k: int) -> np.ndarray:
    """``∧^k Gram_P`` in exact integer arithmetic."""
    return compound_matrix(np.array(gram_P, dtype=object), k)

"""Formal solution at the irregular point z = ∞.

In the frame ``Y = Ψ Z`` the z-equation reads ``Y' = (U + V/z) Y`` with
``U = diag(u)`` and ``V = Ψ μ Ψ⁻¹`` antisymmetric. Writing
``Y = (I + Σ G_k z^{-k}) e^{zU}`` gives

    (u_i - u_j)(G_{k+1})_{ij} = -((k + V) G_k)_{ij},
    (k+1)(G_{k+1})_{ij}       = -Σ_{m: u_m ≠ u_j} V_{im} (G_{k+1})_{mj}   when u_i = u_j.

The second line covers the diagonal and, at coalescence points where the
corresponding block of V vanishes, coalescing pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CoalescenceError
from ..frobenius_p import SmallQHPoint, build_system_p, canonical_coordinates, psi_matrix
from ..precision import Backend, get_backend


@dataclass
class FormalSolution:
    """Truncated formal solution ``Ψ⁻¹ (I + Σ_{k≤N} G_k z^{-k}) e^{zU}``."""

    PsiInv: np.ndarray
    G_coeffs: list
    U_diag: np.ndarray
    truncation_estimate: float
    V: np.ndarray
    perm: np.ndarray | None
    backend: Backend

    @property
    def order(self) -> int:
        return len(self.G_coeffs) - 1

    @property
    def n(self) -> int:
        return len(self.U_diag)


def coalescence_blocks(u, tol: float = 1e-10) -> np.ndarray:
    """Label per index; equal labels mark coalescing canonical coordinates."""
    uc = np.array([complex(x) for x in u])
    scale = max(1.0, np.abs(uc).max()) if len(uc) else 1.0
    labels = -np.ones(len(uc), dtype=int)
    nxt = 0
    for i in range(len(uc)):
        if labels[i] >= 0:
            continue
        same = np.abs(uc - uc[i]) <= tol * scale
        labels[same & (labels < 0)] = nxt
        nxt += 1
    return labels


def formal_coefficients(V: np.ndarray, u, N: int, backend: Backend | None = None,
                        coalescence_tol: float = 1e-10) -> list:
    """``[G_0 = I, G_1, …, G_N]`` for ``Y' = (diag(u) + V/z) Y``."""
    be = backend or get_backend()
    n = len(u)
    labels = coalescence_blocks(u, coalescence_tol)
    for i in range(n):
        for j in range(n):
            if i != j and labels[i] == labels[j] and abs(complex(V[i, j])) > 1e-8 * max(1.0, be.absmax(V)):
                raise CoalescenceError(
                    f"u_{i + 1} = u_{j + 1} but V_{i + 1}{j + 1} = {complex(V[i, j]):.3g} != 0; "
                    "no formal solution of the standard form")
    G = [be.eye(n)]
    for k in range(N):
        A = -(G[k] * k + V @ G[k])
        Gn = be.zeros((n, n))
        for i in range(n):
            for j in range(n):
                if labels[i] != labels[j]:
                    Gn[i, j] = A[i, j] / (u[i] - u[j])
        for j in range(n):
            outside = [m for m in range(n) if labels[m] != labels[j]]
            for i in range(n):
                if labels[i] == labels[j]:
                    Gn[i, j] = -sum((V[i, m] * Gn[m, j] for m in outside), 0 * Gn[i, j]) / (k + 1)
        G.append(Gn)
    return G


def least_term_order(G: list, radius: float, backend: Backend | None = None) -> tuple[int, float]:
    """Index minimising ``‖G_k‖ R^{-k}`` and the size of the next term."""
    be = backend or get_backend()
    norms = [be.absmax(Gk) * float(radius) ** (-k) for k, Gk in enumerate(G)]
    N = int(np.argmin(norms))
    nxt = norms[N + 1] if N + 1 < len(norms) else norms[N]
    return N, float(nxt)


def generic_formal_solution(Psi: np.ndarray, u, mu: np.ndarray, order: int,
                            backend: Backend | None = None, perm=None) -> FormalSolution:
    """Formal solution for arbitrary (ordered) ``u``, Ψ and μ."""
    be = backend or get_backend()
    Psi = be.asarray(Psi)
    PsiInv = be.inv(Psi)
    V = Psi @ be.asarray(mu) @ PsiInv
    ub = be.asarray(np.asarray(u) if not be.is_mp else u)
    G = formal_coefficients(V, ub, order + 1, be)
    est = be.absmax(G[-1])
    return FormalSolution(PsiInv, G[:-1], ub, est, V, None if perm is None else np.asarray(perm), be)


def formal_solution(point: SmallQHPoint, phi: float, signs=None, order: int = 30,
                    backend: Backend | None = None) -> FormalSolution:
    """Formal solution of the ℙⁿ⁻¹ system with rows in ℓ-lexicographic order."""
    be = backend or get_backend()
    u, perm = canonical_coordinates(point, phi, be)
    Psi = psi_matrix(point, signs, be)[perm]
    system = build_system_p(point, be)
    return generic_formal_solution(Psi, u, system.mu, order, be, perm)


def truncate(fs: FormalSolution, N: int) -> FormalSolution:
    N = min(N, fs.order)
    est = fs.backend.absmax(fs.G_coeffs[N + 1]) if N + 1 <= fs.order else fs.truncation_estimate
    return FormalSolution(fs.PsiInv, fs.G_coeffs[: N + 1], fs.U_diag, est, fs.V, fs.perm, fs.backend)


def evaluate_series(fs: FormalSolution, z) -> np.ndarray:
    """``I + Σ G_k z^{-k}`` (no exponential factor)."""
    be = fs.backend
    w = 1 / be.scalar(z)
    out = be.zeros((fs.n, fs.n))
    for Gk in reversed(fs.G_coeffs):
        out = out * w + Gk
    return out


def evaluate_formal(fs: FormalSolution, z, with_exponential: bool = True) -> np.ndarray:
    """Truncated ``Ψ⁻¹ G(z) e^{zU}``."""
    be = fs.backend
    Y = fs.PsiInv @ evaluate_series(fs, z)
    if with_exponential:
        zc = be.scalar(z)
        Y = Y * be.expv(np.array([zc * x for x in fs.U_diag], dtype=Y.dtype))[None, :]
    return Y


def formal_residual(fs: FormalSolution, z, U: np.ndarray, mu: np.ndarray) -> float:
    """Relative residual of ``Z' - (U + μ/z) Z`` for the truncated series (no exponential).

    With ``Z = Ψ⁻¹ G e^{zU}`` the exponential factors out:
    ``Ψ⁻¹ (G' + G·diag(u)) - (U + μ/z) Ψ⁻¹ G``.
    """
    be = fs.backend
    zc = be.scalar(z)
    w = 1 / zc
    G = evaluate_series(fs, z)
    dG = be.zeros((fs.n, fs.n))
    for k in range(len(fs.G_coeffs) - 1, 0, -1):
        dG = dG + fs.G_coeffs[k] * (-k * w ** (k + 1))
    D = be.zeros((fs.n, fs.n))
    for i in range(fs.n):
        D[i, i] = fs.U_diag[i]
    lhs = fs.PsiInv @ (dG + G @ D)
    rhs = (be.asarray(U) + be.asarray(mu) * w) @ fs.PsiInv @ G
    return be.absmax(lhs - rhs) / max(1.0, be.absmax(rhs))

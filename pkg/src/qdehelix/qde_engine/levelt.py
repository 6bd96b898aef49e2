"""Topological-enumerative solution at the Fuchsian point z = 0.

``Z_top(t, z) = F(t, z)·z^μ·z^R`` with ``F(t, 0) = I`` and ``R = c1∪``.
Entries of ``F`` come from the scalar hypergeometric series

    e^{ztσ} Σ_d q^d z^{nd} Π_{r=1..d} (zσ + r)^{-n}   (mod σ^n),

reorganised so that

    F_{km}(z) = Σ_d q^d z^{nd+k-m} [x^{n-1-m}] ( e^{xt} (d+x)^{n-1-k} / Π_{r≤d} (x+r)^n ).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, lgamma

import mpmath
import numpy as np

from ..errors import ArgumentError, NumericError, TailBoundError
from ..frobenius_p import JointSystemData, SmallQHPoint, build_system_p
from ..precision import Backend, get_backend

DEFAULT_TAIL_TOL = 1e-10


def _pmul(a, b, n):
    c = [Fraction(0)] * n
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j in range(n - i):
            c[i + j] += x * b[j]
    return c


def hypergeometric_coefficients(n: int, D: int) -> list[list[list[Fraction]]]:
    """``P[d][k]`` = coefficients in x of ``(d+x)^{n-1-k} / Π_{r≤d}(x+r)^n`` mod x^n."""
    out = []
    base = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for d in range(D + 1):
        if d > 0:
            inv = [Fraction((-1) ** i, d ** (i + 1)) for i in range(n)]
            for _ in range(n):
                base = _pmul(base, inv, n)
        lin = ([Fraction(d), Fraction(1)] + [Fraction(0)] * n)[:n]
        row = []
        p = [Fraction(1)] + [Fraction(0)] * (n - 1)
        powers = [p]
        for _ in range(n - 1):
            p = _pmul(p, lin, n)
            powers.append(p)
        for k in range(n):
            row.append(_pmul(powers[n - 1 - k], base, n))
        out.append(row)
    return out


@dataclass
class LeveltSolution:
    """Truncated Levelt solution; ``F(z) = Σ_p F_coeffs[p]·z^p``."""

    system: JointSystemData
    order: int
    q_order: int
    theta_coeffs: list
    F_coeffs: list
    dF_dt_coeffs: list
    R_exponent: np.ndarray
    tail_bound: float
    tail_block: np.ndarray
    tail_power: int
    radius: float
    backend: Backend

    @property
    def n(self) -> int:
        return self.system.n

    def tail_estimate(self, r: float) -> float:
        """Size of the first omitted q-degree block at ``|z| = r`` (doubled)."""
        return 2.0 * self.backend.absmax(self.tail_block) * r ** self.tail_power


def _degree_block(n, P_d, d, q, et, be):
    """Matrix of ``a_{d,k,m}(t)`` scaled by ``q^d``; power is ``nd+k-m``."""
    A = be.zeros((n, n))
    B = be.zeros((n, n))  # t-derivative of the coefficient without q^d
    qd = q ** d
    for k in range(n):
        for m in range(n):
            j = n - 1 - m
            a = sum(be.scalar(P_d[k][i]) * et[j - i] for i in range(j + 1))
            da = sum(be.scalar(P_d[k][i]) * et[j - 1 - i] for i in range(j)) if j >= 1 else 0 * a
            A[k, m] = qd * a
            B[k, m] = qd * (d * a + da)
    return A, B


def topological_solution(point: SmallQHPoint, q_order: int = 24, z_order: int | None = None,
                         radius: float = 1.0, backend: Backend | None = None,
                         tail_tol: float = DEFAULT_TAIL_TOL) -> LeveltSolution:
    """Levelt solution truncated at q-degree ``q_order`` and z-degree ``z_order``.

    Parameters
    ----------
    point : SmallQHPoint
    q_order, z_order : int
        Truncation orders. ``z_order`` defaults to ``n·(q_order+1) - 1``.
    radius : float
        Largest ``|z|`` at which the solution will be evaluated; the tail
        estimate at this radius must fall below ``tail_tol``.

    Raises
    ------
    TailBoundError
        When the truncation is too short for ``radius``; carries suggested orders.
    """
    if q_order < 1 or (z_order is not None and z_order < 1):
        raise ArgumentError("truncation orders must be >= 1")
    be = backend or get_backend()
    n = point.n
    t = be.scalar(point.t)
    if abs(complex(point.q)) == 0:
        raise ArgumentError("q = 0 is degenerate")
    system = build_system_p(point, be)
    zmax = n * (q_order + 1) - 1 if z_order is None else z_order
    D = min(q_order, zmax // n)
    P = hypergeometric_coefficients(n, D + 1)
    q = be.exp(t)
    et = [t ** i / factorial(i) for i in range(n)]
    Fc = [be.zeros((n, n)) for _ in range(zmax + 1)]
    dFc = [be.zeros((n, n)) for _ in range(zmax + 1)]
    tail = be.zeros((n, n))
    tail_power = zmax + 1
    for d in range(D + 2):
        A, B = _degree_block(n, P[d], d, q, et, be)
        for k in range(n):
            for m in range(n):
                p = n * d + k - m
                if p <= zmax and d <= D:
                    Fc[p][k, m] += A[k, m]
                    dFc[p][k, m] += B[k, m]
                elif abs(A[k, m]) > 0:
                    tail[k, m] = A[k, m] if abs(A[k, m]) > abs(tail[k, m]) else tail[k, m]
                    tail_power = min(tail_power, p)
    sol = LeveltSolution(system, zmax, D, P[: D + 1], Fc, dFc, system.R, 0.0, tail,
                         tail_power, float(radius), be)
    sol.tail_bound = max(sol.tail_estimate(radius), be.eps)
    if sol.tail_bound > tail_tol:
        qo = _suggest_q_order(n, abs(complex(point.q)), radius, tail_tol)
        raise TailBoundError(
            f"truncation (q_order={q_order}, z_order={zmax}) gives tail {sol.tail_bound:.3g} at |z|={radius}",
            suggested_orders=(qo, n * (qo + 1) - 1))
    return sol


def _suggest_q_order(n: int, absq: float, r: float, tol: float) -> int:
    """Smallest D whose first omitted term ``(|q| r^n)^{D+1} (D+2)^n / ((D+1)!)^n`` is below tol/100."""
    logq = np.log(max(absq, 1e-300)) + n * np.log(max(r, 1e-300))
    D = 1
    while D < 2000:
        d = D + 1
        if d * logq + n * np.log(d + 1) - n * lgamma(d + 1) < np.log(tol / 100):
            return D
        D += 1
    return D


def z_power(M: np.ndarray, L, be: Backend) -> np.ndarray:
    """``exp(M·L)`` for diagonal or nilpotent ``M``."""
    n = M.shape[0]
    Mb = be.asarray(M)
    off = Mb - np.diag(np.diag(Mb))
    if be.absmax(off) == 0:
        out = be.zeros((n, n))
        for i in range(n):
            out[i, i] = be.exp(Mb[i, i] * L)
        return out
    out = be.eye(n)
    term = be.eye(n)
    for m in range(1, n + 1):
        term = term @ Mb * (L / m)
        if be.absmax(term) == 0:
            break
        out = out + term
    if be.absmax(term) != 0:
        raise ArgumentError("z_power needs a diagonal or nilpotent exponent")
    return out


def log_z(z, arg_z, be: Backend):
    """``ln|z| + i·arg`` on the universal cover, on the sheet of ``arg_z``.

    The imaginary part is the exact argument of ``z`` shifted by the
    multiple of 2π nearest to ``arg_z``, so a rounded ``arg_z`` does not
    leak into the result.
    """
    zc = be.scalar(z)
    r = abs(zc)
    if be.is_mp:
        a = mpmath.arg(zc)
        k = mpmath.nint((mpmath.mpf(arg_z) - a) / (2 * mpmath.pi))
        return mpmath.log(r) + 1j * (a + 2 * mpmath.pi * k)
    a = float(np.angle(zc))
    k = round((float(arg_z) - a) / (2 * np.pi))
    return complex(np.log(r), a + 2 * np.pi * k)


def evaluate_F(sol: LeveltSolution, z, derivative: bool = False):
    """Horner evaluation of ``F`` (and ``dF/dz`` when asked)."""
    be = sol.backend
    zc = be.scalar(z)
    coeffs = sol.F_coeffs
    out = be.zeros((sol.n, sol.n))
    for p in reversed(range(len(coeffs))):
        out = out * zc + coeffs[p]
    if not derivative:
        return out
    dz = be.zeros((sol.n, sol.n))
    for p in reversed(range(1, len(coeffs))):
        dz = dz * zc + coeffs[p] * p
    return out, dz


def evaluate_dF_dt(sol: LeveltSolution, z):
    be = sol.backend
    zc = be.scalar(z)
    out = be.zeros((sol.n, sol.n))
    for p in reversed(range(len(sol.dF_dt_coeffs))):
        out = out * zc + sol.dF_dt_coeffs[p]
    return out


def _check_radius(sol: LeveltSolution, z):
    r = float(abs(complex(z)))
    if r > sol.radius * (1 + 1e-12) and sol.tail_estimate(r) > max(sol.tail_bound, DEFAULT_TAIL_TOL):
        raise TailBoundError(f"|z|={r:.6g} exceeds the validated radius {sol.radius:.6g}")
    if r == 0:
        raise ArgumentError("z = 0 is the Fuchsian singularity; pass a point on the universal cover")


def evaluate_levelt(sol: LeveltSolution, z, arg_z: float) -> np.ndarray:
    """``F(z)·z^μ·z^R`` with the branch fixed by ``arg_z``."""
    _check_radius(sol, z)
    be = sol.backend
    L = log_z(z, arg_z, be)
    return evaluate_F(sol, z) @ z_power(sol.system.mu, L, be) @ z_power(sol.R_exponent, L, be)


def levelt_factors(sol: LeveltSolution, z, arg_z: float) -> tuple[np.ndarray, np.ndarray]:
    """``(F(z)·z^μ, z^{-R})`` so that ``Z_top = head @ inv(tail_inv)``.

    Far from the principal sheet ``z^R`` is badly conditioned; solving
    against the head only and applying the exact ``z^{-R}`` keeps the
    connection matrix accurate there.
    """
    _check_radius(sol, z)
    be = sol.backend
    L = log_z(z, arg_z, be)
    return evaluate_F(sol, z) @ z_power(sol.system.mu, L, be), z_power(sol.R_exponent, -L, be)


def joint_residuals(sol: LeveltSolution, z) -> tuple[float, float]:
    """Residuals of both equations, reduced to identities for ``F``.

    Uses ``z^μ R z^{-μ} = zR``, so the z-equation becomes
    ``F' + (Fμ - μF)/z + FR - UF = 0`` and the t-equation ``∂_t F = zCF``.
    """
    be = sol.backend
    s = sol.system
    zc = be.scalar(z)
    F, dF = evaluate_F(sol, z, derivative=True)
    mu = be.asarray(s.mu)
    R = be.asarray(s.R)
    rz = dF + (F @ mu - mu @ F) / zc + F @ R - s.U @ F
    rt = evaluate_dF_dt(sol, z) - zc * (s.Cmat @ F)
    scale = max(1.0, be.absmax(F))
    return be.absmax(rz) / scale, be.absmax(rt) / scale


def orthogonality_residual(sol: LeveltSolution, z) -> float:
    """``max |F(-z)ᵀ η F(z) - η|``."""
    be = sol.backend
    eta = be.asarray(sol.system.eta)
    F1 = evaluate_F(sol, z)
    F2 = evaluate_F(sol, -be.scalar(z))
    return be.absmax(F2.T @ eta @ F1 - eta)


def levelt_tail_bound(sol: LeveltSolution, r: float) -> float:
    return sol.tail_estimate(r)


def check_levelt(sol: LeveltSolution, radius: float | None = None, samples: int = 8) -> dict:
    """Residual diagnostics on a circle; raises if they exceed the tail bound."""
    r = sol.radius if radius is None else radius
    zs = [r * np.exp(2j * np.pi * (k + 0.5) / samples) for k in range(samples)]
    res = [joint_residuals(sol, z) for z in zs]
    orth = max(orthogonality_residual(sol, z) for z in zs)
    out = {"z_equation": max(a for a, _ in res), "t_equation": max(b for _, b in res),
           "orthogonality": orth}
    if max(out.values()) > max(1e3 * sol.tail_bound, 1e-9):
        raise NumericError(f"Levelt solution fails its own equations: {out}")
    return out

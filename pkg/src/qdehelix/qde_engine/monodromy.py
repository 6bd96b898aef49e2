"""Monodromy data ``(μ, R, S, C)``, ``M₀`` and the constraint checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ChamberError, NumericError
from ..frobenius_p import (SmallQHPoint, build_system_p, canonical_coordinates, closest_stokes_ray,
                           psi_matrix, raw_canonical_coordinates)
from ..precision import Backend, get_backend
from .formal import generic_formal_solution
from .integrate import IntegratorConfig, propagate
from .levelt import LeveltSolution, evaluate_levelt, levelt_factors, topological_solution, z_power
from .stokes import StokesRun, central_connection, stokes_matrix, stokes_solutions

TRIANGULARITY_TOL = 1e-8


@dataclass
class MonodromyData:
    mu: np.ndarray
    R: np.ndarray
    S: np.ndarray
    C: np.ndarray
    phi: float
    order_permutation: np.ndarray
    psi_signs: tuple
    residuals: dict = field(default_factory=dict)
    eta: np.ndarray | None = None
    u: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.S.shape[0]

    @property
    def M0(self) -> np.ndarray:
        return monodromy_m0(self.mu, self.R)


def _backend_for(*arrays) -> Backend:
    if any(np.asarray(a).dtype == object and any(not isinstance(x, (int, float, complex)) for x in np.asarray(a).flat)
           for a in arrays):
        import mpmath
        return get_backend(f"mp:{mpmath.mp.dps}")
    return get_backend("binary64")


def monodromy_m0(mu, R, be: Backend | None = None) -> np.ndarray:
    """``M₀ = exp(2πiμ)·exp(2πiR)`` with the nilpotent exponential summed exactly."""
    be = be or _backend_for(mu)
    two_pi_i = 2j * be.pi
    return z_power(np.asarray(mu), two_pi_i, be) @ z_power(np.asarray(R), two_pi_i, be)


def _rel(be: Backend, lhs, rhs) -> float:
    num = math.sqrt(sum(abs(x) ** 2 for x in np.asarray(lhs - rhs).flat))
    den = math.sqrt(sum(abs(x) ** 2 for x in np.asarray(rhs).flat))
    return float(num / max(1.0, den))


def unitriangularity_defect(S) -> float:
    S = np.asarray(S)
    n = S.shape[0]
    d = 0.0
    for i in range(n):
        d = max(d, float(abs(S[i, i] - 1)))
        for j in range(i):
            d = max(d, float(abs(S[i, j])))
    return d


def verify_constraints(data: MonodromyData, eta=None, be: Backend | None = None) -> dict:
    """Relative Frobenius residuals of the three identities linking S, C, μ, R.

    * ``const1``: ``C Sᵀ S⁻¹ C⁻¹ = M₀``
    * ``const2``: ``S = C⁻¹ e^{-πiR} e^{-πiμ} η⁻¹ C^{-T}``
    * ``const3``: ``Sᵀ = C⁻¹ e^{πiR} e^{πiμ} η⁻¹ C^{-T}``

    Each value is ``‖lhs - rhs‖_F / max(1, ‖rhs‖_F)``; ``unitriangularity``
    is the max-entry defect of S from upper unitriangular form.
    """
    eta = data.eta if eta is None else eta
    be = be or _backend_for(data.S, data.C)
    S, C = be.asarray(data.S), be.asarray(data.C)
    etab = be.asarray(eta)
    Ci = be.inv(C)
    CiT = Ci.T
    Si = be.inv(S)
    M0 = monodromy_m0(data.mu, data.R, be)
    pi_i = 1j * be.pi
    eR_m = z_power(np.asarray(data.R), -pi_i, be)
    eR_p = z_power(np.asarray(data.R), pi_i, be)
    emu_m = z_power(np.asarray(data.mu), -pi_i, be)
    emu_p = z_power(np.asarray(data.mu), pi_i, be)
    etai = be.inv(etab)
    out = {
        "const1": _rel(be, C @ S.T @ Si @ Ci, M0),
        "const2": _rel(be, S, Ci @ eR_m @ emu_m @ etai @ CiT),
        "const3": _rel(be, S.T, Ci @ eR_p @ emu_p @ etai @ CiT),
        "unitriangularity": unitriangularity_defect(S),
    }
    return out


def _orient(S) -> str:
    """'upper', 'lower' or 'neither' according to which triangle is negligible."""
    S = np.asarray(S)
    n = S.shape[0]
    lo = max((float(abs(S[i, j])) for i in range(n) for j in range(i)), default=0.0)
    up = max((float(abs(S[i, j])) for i in range(n) for j in range(i + 1, n)), default=0.0)
    if lo <= TRIANGULARITY_TOL:
        return "upper"
    if up <= TRIANGULARITY_TOL:
        return "lower"
    return "neither"


def solve_monodromy(U, mu, Psi_raw, u_raw, phi: float, ztop, cfg: IntegratorConfig | None = None,
                    be: Backend | None = None, perm=None) -> tuple[np.ndarray, np.ndarray, np.ndarray, StokesRun, dict]:
    """Generic pipeline: order, formal solution, Stokes solutions, ``S`` and ``C``.

    Parameters
    ----------
    Psi_raw, u_raw :
        Ψ-matrix (rows) and canonical coordinates in some reference order.
    ztop : callable
        ``ztop(z, arg_z)`` evaluating the topological solution, either as a
        matrix or as a pair accepted by ``central_connection``.
    perm :
        ℓ-lexicographic permutation of ``u_raw``; computed if omitted.

    The orientation of the ordering is validated by the triangularity of S;
    if S comes out lower-triangular the order is reversed and recomputed.
    """
    be = be or get_backend()
    cfg = cfg or IntegratorConfig()
    uc = np.array([complex(x) for x in u_raw])
    if perm is None:
        keys = (np.exp(1j * phi) * uc).real
        perm = np.argsort(keys, kind="stable")
    perm = np.asarray(perm)
    diag = {"order_reversed": False}
    for attempt in range(2):
        Psi = be.asarray(Psi_raw)[perm]
        u = be.asarray(np.asarray(u_raw, dtype=object if be.is_mp else complex))[perm] if be.is_mp \
            else np.asarray(u_raw, dtype=complex)[perm]
        fs = generic_formal_solution(Psi, u, mu, 4, be, perm)
        run = stokes_solutions(U, mu, fs, phi, cfg, be)
        S, condR = stokes_matrix(run.ZL, run.ZR, be, return_cond=True)
        orient = _orient(S)
        if orient == "lower" and attempt == 0:
            perm = perm[::-1]
            diag["order_reversed"] = True
            continue
        break
    if orient != "upper":
        raise NumericError(f"Stokes matrix is not triangular (orientation {orient}); "
                           f"defect {unitriangularity_defect(S):.3g}")
    Zt = ztop(run.z_star, phi)
    C, condT = central_connection(Zt, run.ZR, be, return_cond=True)
    diag.update(run.diagnostics)
    diag.update({"cond_ZR": condR, "cond_Ztop": condT})
    return S, C, perm, run, diag


def monodromy_data(point: SmallQHPoint, phi: float, signs=None, cfg: IntegratorConfig | None = None,
                   backend: Backend | None = None, levelt: LeveltSolution | None = None,
                   q_order: int | None = None, z_order: int | None = None) -> MonodromyData:
    """Compute ``(μ, R, S, C)`` of ℙⁿ⁻¹ at ``point`` for the admissible direction ``phi``."""
    be = backend or get_backend()
    cfg = cfg or IntegratorConfig()
    n = point.n
    signs = tuple([1] * n if signs is None else signs)
    system = build_system_p(point, be)
    _, perm = canonical_coordinates(point, phi, be)
    u_raw = raw_canonical_coordinates(point, be)
    Psi = psi_matrix(point, signs, be)
    if q_order is None:
        q_order = _q_order_for(n, cfg.base_radius, abs(point.q), be)
    lev = levelt or topological_solution(point, q_order=q_order, z_order=z_order,
                                         radius=cfg.base_radius, backend=be,
                                         tail_tol=levelt_tail_tol(be))
    S, C, perm, run, diag = solve_monodromy(system.U, system.mu, Psi, u_raw, phi,
                                            lambda z, a: levelt_factors(lev, z, a), cfg, be, perm)
    data = MonodromyData(system.mu, system.R, S, C, float(phi), perm, signs, eta=system.eta,
                         u=u_raw[perm], diagnostics=diag)
    data.residuals = verify_constraints(data, system.eta, be)
    return data


def _q_order_for(n: int, r: float, absq: float, be: Backend | None = None) -> int:
    from .levelt import _suggest_q_order
    tol = 1e-20 if be is None or not be.is_mp else min(1e-20, be.eps * 1e-3)
    return max(8, _suggest_q_order(n, absq, r, tol))


def levelt_tail_tol(be: Backend) -> float:
    """Acceptance level for the Levelt tail: 1e-13 in binary64, ``10·eps`` otherwise."""
    return 10 * be.eps if be.is_mp else 1e-13


def continuation_monodromy(point: SmallQHPoint, radius: float = 1.0, arg0: float = 0.1,
                           cfg: IntegratorConfig | None = None, backend: Backend | None = None) -> dict:
    """Continue ``Z_top`` once around ``z = 0`` numerically and compare with ``Z_top·M₀``.

    Returns the relative max-entry residuals of the numerical continuation
    against (a) the series evaluated on the next sheet and (b) ``Z_top·M₀``.
    """
    be = backend or get_backend()
    cfg = cfg or IntegratorConfig()
    lev = topological_solution(point, q_order=_q_order_for(point.n, radius, abs(point.q), be),
                               radius=radius, backend=be, tail_tol=levelt_tail_tol(be))
    z0 = radius * np.exp(1j * arg0)
    Z0 = evaluate_levelt(lev, z0, arg0)
    m = 64
    path = [radius * np.exp(1j * (arg0 + 2 * np.pi * k / m)) for k in range(m + 1)]
    res = propagate(lev.system.U, lev.system.mu, path, Z0, be, cfg, orthonormalize=False)
    M0 = monodromy_m0(lev.system.mu, lev.system.R, be)
    target = Z0 @ M0
    sheet = evaluate_levelt(lev, z0, arg0 + 2 * np.pi)
    scale = max(1.0, be.absmax(target))
    return {"vs_M0": be.absmax(res.Y - target) / scale, "vs_series": be.absmax(res.Y - sheet) / scale,
            "series_vs_M0": be.absmax(sheet - target) / scale}


def chamber_crossing(point1: SmallQHPoint, point2: SmallQHPoint, phi: float, samples: int = 257,
                     tol: float = 1e-9):
    """First sample on the segment ``t1 → t2`` where ``phi`` meets a Stokes ray, else ``None``."""
    prev = None
    for s in np.linspace(0.0, 1.0, samples):
        p = SmallQHPoint(point1.n, point1.t + s * (point2.t - point1.t))
        u = [complex(x) for x in raw_canonical_coordinates(p)]
        d, ray = closest_stokes_ray(phi, u)
        if d <= tol:
            return p
        signed = {}
        for i in range(len(u)):
            for j in range(len(u)):
                if i != j:
                    w = -1j * (u[i] - u[j]).conjugate()
                    signed[(i, j)] = (np.angle(w) - phi + np.pi) % (2 * np.pi) - np.pi
        if prev is not None:
            for key, v in signed.items():
                if np.sign(v) != np.sign(prev[key]) and abs(v) < 0.5 and abs(prev[key]) < 0.5:
                    return p
        prev = signed
    return None


def chamber_constancy_check(point1: SmallQHPoint, point2: SmallQHPoint, phi: float,
                            cfg: IntegratorConfig | None = None, signs=None,
                            backend: Backend | None = None) -> float:
    """Max entrywise difference of ``(S, C)`` computed independently at two points."""
    if point1.n != point2.n:
        raise ChamberError("points live on different projective spaces")
    hit = chamber_crossing(point1, point2, phi)
    if hit is not None:
        raise ChamberError(f"a Stokes ray crosses phi={phi:.6g} on the segment (near t={hit.t:.6g})")
    d1 = monodromy_data(point1, phi, signs, cfg, backend)
    if point1 == point2:
        return 0.0
    d2 = monodromy_data(point2, phi, signs, cfg, backend)
    be = backend or get_backend()
    return max(be.absmax(d1.S - d2.S), be.absmax(d1.C - d2.C))

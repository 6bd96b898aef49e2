"""Stokes fundamental solutions, Stokes matrix and central connection matrix.

``Z_L`` has the formal asymptotics in the sector ``φ < arg z < φ + π`` and
``Z_R`` in ``φ - π < arg z < φ``. Column j of a Stokes solution is pinned
down by its asymptotics on the two boundary rays of its sector: on a ray of
direction θ it equals the formal column j plus an unknown combination of
the formal columns that are strictly recessive with respect to ``e^{z u_j}``
there. Each such block is integrated inward from the matching radius along
the ray and then along the circle ``|z| = r*`` to the base point
``z* = r*·e^{iφ}``; the column is the intersection of the two affine
subspaces obtained from the two boundary rays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericError, PrecisionError
from ..frobenius_p import SmallQHPoint, build_system_p
from ..precision import Backend, get_backend
from .formal import FormalSolution, formal_coefficients, formal_solution, least_term_order, truncate, evaluate_series
from .integrate import IntegratorConfig, propagate
from .levelt import evaluate_levelt

ARC_CHORD = math.pi / 16


@dataclass
class StokesRun:
    """Both Stokes solutions at ``z*`` with the data used to build them."""

    ZL: np.ndarray
    ZR: np.ndarray
    z_star: complex
    phi: float
    matching_radius: float
    formal: FormalSolution
    diagnostics: dict = field(default_factory=dict)


def _digits(be: Backend) -> float:
    return 15.6 if not be.is_mp else float(be.digits)


def min_separation(u) -> float:
    uc = [complex(x) for x in u]
    ds = [abs(a - b) for i, a in enumerate(uc) for b in uc[i + 1:] if abs(a - b) > 1e-9 * max(1.0, abs(a))]
    return min(ds) if ds else 1.0


def default_matching_radius(u, be: Backend) -> float:
    """Radius where ``e^{-R·d_min}`` reaches working precision."""
    return max(3.0, math.log(10) * _digits(be) * 1.0 / min_separation(u))


def ray_path(theta: float, R: float, r_star: float, phi: float) -> list[complex]:
    """From ``R e^{iθ}`` radially to ``r* e^{iθ}``, then along the circle to ``r* e^{iφ}``."""
    pts = [R * np.exp(1j * theta), r_star * np.exp(1j * theta)]
    dth = phi - theta
    m = max(1, int(math.ceil(abs(dth) / ARC_CHORD - 1e-12)))
    for i in range(1, m):
        pts.append(r_star * np.exp(1j * (theta + dth * i / m)))
    # every path must end at exactly the same floating point base point
    pts.append(r_star * np.exp(1j * phi))
    return pts


class _ColumnSolver:
    def __init__(self, U, mu, fs: FormalSolution, phi, R, cfg, be):
        self.U, self.mu, self.fs, self.phi, self.R, self.cfg, self.be = U, mu, fs, phi, R, cfg, be
        self.uc = np.array([complex(x) for x in fs.U_diag])
        self.scale = max(1.0, float(np.abs(self.uc).max()))
        self._cache: dict = {}
        self.steps = 0

    def recessive(self, theta: float, j: int) -> list[int]:
        re = (np.exp(1j * theta) * self.uc).real
        idx = [m for m in np.argsort(re, kind="stable") if re[m] < re[j] - 1e-9 * self.scale]
        return idx

    def ray(self, theta: float, j: int):
        key = (round(theta, 14), j)
        if key in self._cache:
            return self._cache[key]
        be = self.be
        z0 = self.R * np.exp(1j * theta)
        W = self.recessive(theta, j)
        cols = W + [j]
        Gz = self.fs.PsiInv @ evaluate_series(self.fs, z0)
        Y = Gz[:, cols]
        res = propagate(self.U, self.mu, ray_path(theta, self.R, self.cfg.base_radius, self.phi), Y, be, self.cfg)
        self.steps += res.steps
        zb = be.scalar(z0)
        x = res.Y[:, -1] * be.exp(res.log_scale + zb * self.fs.U_diag[j])
        out = (x, res.Y[:, :-1])
        self._cache[key] = out
        return out

    def column(self, j: int, other_theta: float):
        be = self.be
        xa, Wa = self.ray(self.phi, j)
        xb, Wb = self.ray(other_theta, j)
        ka, kb = Wa.shape[1], Wb.shape[1]
        if ka + kb == 0:
            gap = be.absmax(xa - xb) / max(1.0, be.absmax(xa))
            return xa, gap
        A = np.hstack([Wa, -Wb])
        sol = be.lstsq(A, xb - xa)
        x = xa + Wa @ sol[:ka] if ka else xa
        y = xb + Wb @ sol[ka:] if kb else xb
        gap = be.absmax(x - y) / max(1.0, be.absmax(x))
        return x, gap


def stokes_solutions(U, mu, fs: FormalSolution, phi: float, cfg: IntegratorConfig | None = None,
                     be: Backend | None = None) -> StokesRun:
    """``Z_L`` and ``Z_R`` at ``z* = r*·e^{iφ}`` for an arbitrary system.

    ``fs`` must be a formal solution whose columns are ordered consistently
    with the ℓ-lexicographic order; it is truncated here at the least term
    for the chosen matching radius.
    """
    be = be or get_backend()
    cfg = cfg or IntegratorConfig()
    u = fs.U_diag
    n = len(u)
    if cfg.matching_radius_policy == "fixed":
        R = float(cfg.matching_radius)
    else:
        R = default_matching_radius(u, be)
    dmin = min_separation(u)
    want = int(R * dmin * 1.2) + 8
    if fs.order < want:
        G = formal_coefficients(fs.V, fs.U_diag, want + 1, be)
        fs = FormalSolution(fs.PsiInv, G, fs.U_diag, fs.truncation_estimate, fs.V, fs.perm, be)
    N, floor = least_term_order(fs.G_coeffs, R, be)
    if cfg.matching_radius_policy == "least-term":
        floor_rel = floor / max(1.0, be.absmax(fs.G_coeffs[0]))
        tries = 0
        while floor_rel > max(cfg.rel_tol, 10 * be.eps) and tries < 3:
            R *= 1.5
            want = int(R * dmin * 1.2) + 8
            G = formal_coefficients(fs.V, fs.U_diag, want + 1, be)
            fs = FormalSolution(fs.PsiInv, G, fs.U_diag, fs.truncation_estimate, fs.V, fs.perm, be)
            N, floor = least_term_order(fs.G_coeffs, R, be)
            floor_rel = floor
            tries += 1
        if floor_rel > 1e3 * max(cfg.rel_tol, 10 * be.eps):
            raise PrecisionError(
                f"least-term floor {floor_rel:.3g} of the formal series exceeds rel_tol {cfg.rel_tol:.3g}; "
                "use a higher working precision (QDE_PRECISION=mp:<digits>)")
    if cfg.formal_order is not None:
        N = min(N, cfg.formal_order)
        floor = be.absmax(fs.G_coeffs[N + 1]) * R ** (-(N + 1)) if N + 1 < len(fs.G_coeffs) else floor
    fs = truncate(fs, N)
    solver = _ColumnSolver(be.asarray(U), be.asarray(mu), fs, phi, R, cfg, be)
    Z = {}
    gaps = {}
    for side, sgn in (("L", 1), ("R", -1)):
        cols = []
        g = 0.0
        for j in range(n):
            x, gap = solver.column(j, phi + sgn * math.pi)
            cols.append(x)
            g = max(g, gap)
        Z[side] = np.stack(cols, axis=1) if n else be.zeros((0, 0))
        gaps[side] = g
    diag = {"formal_order": N, "least_term": floor, "matching_radius": R, "steps": solver.steps,
            "matching_gap_L": gaps["L"], "matching_gap_R": gaps["R"]}
    z_star = cfg.base_radius * np.exp(1j * phi)
    return StokesRun(Z["L"], Z["R"], z_star, phi, R, fs, diag)


def stokes_fundamental(point: SmallQHPoint, phi: float, signs=None, side: str = "L",
                       cfg: IntegratorConfig | None = None, be: Backend | None = None) -> np.ndarray:
    """Value of ``Z_L`` or ``Z_R`` at ``z* = r*·e^{iφ}`` for the ℙⁿ⁻¹ system."""
    be = be or get_backend()
    system = build_system_p(point, be)
    fs = formal_solution(point, phi, signs, order=4, backend=be)
    run = stokes_solutions(system.U, system.mu, fs, phi, cfg, be)
    if side.upper() == "L":
        return run.ZL
    if side.upper() == "R":
        return run.ZR
    raise ValueError(f"side must be 'L' or 'R', got {side!r}")


def stokes_matrix(ZL_star, ZR_star, be: Backend | None = None, return_cond: bool = False):
    """``S = Z_R*⁻¹ Z_L*``."""
    be = be or get_backend()
    c = be.cond(ZR_star)
    if not np.isfinite(c) or c > 1e14:
        raise NumericError(f"Z_R at the base point is near-singular (cond {c:.3g})")
    S = be.solve(ZR_star, ZL_star)
    return (S, c) if return_cond else S


def central_connection(Ztop_star, ZR_star, be: Backend | None = None, return_cond: bool = False):
    """``C = Z_top*⁻¹ Z_R*`` (both evaluated at the same point of the universal cover).

    ``Ztop_star`` may also be a pair ``(head, tail_inv)`` with
    ``Z_top = head @ inv(tail_inv)``; then ``C = tail_inv @ head⁻¹ Z_R``.
    """
    be = be or get_backend()
    head, tail_inv = Ztop_star if isinstance(Ztop_star, tuple) else (Ztop_star, None)
    c = be.cond(head)
    if not np.isfinite(c) or c > 1e14:
        raise NumericError(f"Z_top at the base point is near-singular (cond {c:.3g})")
    C = be.solve(head, ZR_star)
    if tail_inv is not None:
        C = tail_inv @ C
    return (C, c) if return_cond else C


def ztop_at_base(levelt, run: StokesRun):
    """``Z_top`` at ``z*`` on the sheet ``arg z = φ``."""
    return evaluate_levelt(levelt, run.z_star, run.phi)

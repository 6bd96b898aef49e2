"""Small quantum cohomology of projective space as a Frobenius manifold.

Basis of ``H•(P^{n-1})`` is ``1, σ, …, σ^{n-1}``. The joint system is

    dZ/dt = z·C(t)·Z,      dZ/dz = (U(t) + μ/z)·Z,

with ``U`` the Euler multiplication, ``C = U/n`` multiplication by σ and
``q = exp(t)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import AdmissibilityError, CoalescenceError, DimensionError, NumericError
from .precision import Backend, get_backend

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SmallQHPoint:
    """Point ``t`` on the line spanned by σ; ``q = exp(t)`` is derived."""

    n: int
    t: complex = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DimensionError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "t", complex(self.t))

    @property
    def q(self) -> complex:
        return cmath.exp(self.t)

    def q_root(self, backend: Backend | None = None):
        """Branch of ``q^{1/n}``, taken as ``exp(t/n)`` (entire in t)."""
        be = backend or get_backend("binary64")
        return be.exp(be.scalar(self.t) / self.n)


@dataclass(frozen=True)
class JointSystemData:
    n: int
    U: np.ndarray
    Cmat: np.ndarray
    mu: np.ndarray
    R: np.ndarray
    eta: np.ndarray
    point: SmallQHPoint | None = None

    @property
    def mu_diag(self) -> np.ndarray:
        return np.real(np.diag(self.mu)).astype(float)


@dataclass(frozen=True)
class RaySpec:
    """Oriented ray ``basepoint + ρ·e^{i·phi}``, ρ > 0."""

    phi: float
    basepoint: complex = 0j
    pair: tuple[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)
        object.__setattr__(self, "basepoint", complex(self.basepoint))


def mu_values(n: int) -> list[Fraction]:
    return [Fraction(2 * k - (n - 1), 2) for k in range(n)]


def c1_matrix(n: int) -> np.ndarray:
    """Integer matrix of ``c1 ∪ = nσ ∪`` in the basis σ^k."""
    R = np.zeros((n, n), dtype=int)
    for k in range(n - 1):
        R[k + 1, k] = n
    return R


def sigma_matrix(n: int) -> np.ndarray:
    """Classical cup product with σ (lower shift)."""
    return c1_matrix(n) // max(n, 1)


def eta_matrix(n: int) -> np.ndarray:
    return np.fliplr(np.eye(n, dtype=int))


def build_system_p(point: SmallQHPoint, backend: Backend | None = None) -> JointSystemData:
    """Matrices ``U, C, μ, R, η`` of the joint system at ``point``."""
    be = backend or get_backend("binary64")
    n = point.n
    q = be.exp(be.scalar(point.t))
    U = be.zeros((n, n))
    for k in range(n - 1):
        U[k + 1, k] = be.scalar(n)
    U[0, n - 1] = U[0, n - 1] + n * q
    Cmat = U / n
    mu = be.asarray(np.diag([float(m) for m in mu_values(n)]))
    if be.is_mp:
        for k, m in enumerate(mu_values(n)):
            mu[k, k] = be.scalar(m)
    else:
        mu = mu.real.astype(float)
    return JointSystemData(n, U, Cmat, mu, c1_matrix(n), eta_matrix(n), point)


def raw_canonical_coordinates(point: SmallQHPoint, backend: Backend | None = None) -> np.ndarray:
    """``u_h = n·e^{2πi(h-1)/n}·q^{1/n}`` in the order h = 1..n."""
    be = backend or get_backend("binary64")
    n = point.n
    qn = point.q_root(be)
    out = be.zeros(n)
    for h in range(n):
        out[h] = n * be.exp(2j * be.pi * h / n if not be.is_mp else 2j * be.pi * h / n) * qn
    return out


def stokes_rays(u) -> set[RaySpec]:
    """Rays ``R_ij = {-i(ū_i - ū_j)ρ}`` for every ordered pair i ≠ j."""
    u = [complex(x) for x in u]
    n = len(u)
    rays = set()
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            w = -1j * (u[i] - u[j]).conjugate()
            if abs(w) == 0:
                raise CoalescenceError(f"coalescent canonical coordinates u_{i + 1} = u_{j + 1}")
            rays.add(RaySpec(cmath.phase(w), 0j, (i + 1, j + 1)))
    return rays


def _angle_dist(a: float, b: float) -> float:
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def closest_stokes_ray(phi: float, u) -> tuple[float, RaySpec | None]:
    best, ray = math.inf, None
    for r in stokes_rays(u):
        d = _angle_dist(phi, r.phi)
        if d < best or (d == best and ray is not None and r.pair < ray.pair):
            best, ray = d, r
    return best, ray


def is_admissible(phi: float, u, tol: float = 1e-9) -> bool:
    """True iff the direction ``phi`` stays ``tol`` away from every Stokes ray."""
    if len(u) < 2:
        return True
    d, _ = closest_stokes_ray(phi, u)
    return d > tol


def require_admissible(phi: float, u, tol: float = 1e-9) -> None:
    if len(u) < 2:
        return
    d, ray = closest_stokes_ray(phi, u)
    if d <= tol:
        raise AdmissibilityError(
            f"phi={phi:.12g} lies within {d:.3g} of Stokes ray R_{ray.pair[0]}{ray.pair[1]} "
            f"(direction {ray.phi:.12g})", ray=ray)


def ray_directions(u, rel_tol: float = 1e-10) -> np.ndarray:
    """Sorted directions in ``[0, 2π)`` of all Stokes rays, skipping coalescing pairs."""
    u = [complex(x) for x in u]
    scale = max([1.0] + [abs(x) for x in u])
    out = set()
    for i in range(len(u)):
        for j in range(len(u)):
            if i != j and abs(u[i] - u[j]) > rel_tol * scale:
                out.add(round(cmath.phase(-1j * (u[i] - u[j]).conjugate()) % TWO_PI, 12))
    return np.array(sorted(out))


def default_direction(u, preferred: float, tol: float = 1e-6) -> float:
    """``preferred`` if admissible, else the midpoint of the gap between rays just below it."""
    dirs = ray_directions(u)
    if len(dirs) == 0:
        return float(preferred)
    p = preferred % TWO_PI
    if min(_angle_dist(p, d) for d in dirs) > tol:
        return float(preferred)
    below = [d for d in dirs if d < p - tol]
    lo = below[-1] if below else dirs[-1] - TWO_PI
    hi = min((d for d in dirs if d >= p - tol), default=dirs[0] + TWO_PI)
    return float(preferred - p + (lo + hi) / 2)


def lex_keys(phi: float, u) -> np.ndarray:
    """Sort keys ``Re(e^{iφ}u_j)``; smaller key means the ray L_j lies further left."""
    return np.array([(cmath.exp(1j * phi) * complex(x)).real for x in u])


def lex_order(phi: float, u, tol: float = 1e-9) -> np.ndarray:
    """Permutation putting ``u`` into ℓ-lexicographic order (0-based indices)."""
    u = list(u)
    if len(u) < 2:
        return np.arange(len(u))
    keys = lex_keys(phi, u)
    perm = np.argsort(keys, kind="stable")
    scale = max(1.0, max(abs(complex(x)) for x in u))
    gaps = np.diff(keys[perm])
    if np.any(gaps <= tol * scale):
        i = int(np.argmin(gaps))
        require_admissible(phi, u, tol)
        raise AdmissibilityError(
            f"lexicographic tie between u_{perm[i] + 1} and u_{perm[i + 1] + 1} at phi={phi:.12g}")
    return perm


def canonical_coordinates(point: SmallQHPoint, phi: float, backend: Backend | None = None,
                          tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Canonical coordinates in ℓ-lexicographic order and the permutation used.

    Returns
    -------
    u : ndarray
        ``u[perm]``, the reordered coordinates.
    perm : ndarray of int
        0-based indices into the formula order h = 1..n.
    """
    raw = raw_canonical_coordinates(point, backend)
    rawc = [complex(x) for x in raw]
    require_admissible(phi, rawc, tol)
    perm = lex_order(phi, rawc, tol)
    return raw[perm], perm


def frame_matrix(point: SmallQHPoint, signs=None, backend: Backend | None = None) -> np.ndarray:
    """Columns are the η-orthonormal idempotent frame ``f_h``."""
    be = backend or get_backend("binary64")
    n = point.n
    signs = [1] * n if signs is None else list(signs)
    if len(signs) != n or any(s not in (1, -1) for s in signs):
        raise DimensionError(f"signs must be {n} values in {{+1, -1}}")
    qn = point.q_root(be)
    F = be.zeros((n, n))
    norm = be.sqrt(be.scalar(n))
    for h in range(1, n + 1):
        for l in range(1, n + 1):
            F[l - 1, h - 1] = (signs[h - 1] / norm * qn ** (be.scalar(n + 1 - 2 * l) / 2)
                               * be.exp(1j * be.pi * (1 - 2 * l) * (h - 1) / n))
    return F


def psi_matrix(point: SmallQHPoint, signs=None, backend: Backend | None = None) -> np.ndarray:
    """Ψ, the inverse of the frame matrix; rows follow the formula order of u_h."""
    be = backend or get_backend("binary64")
    F = frame_matrix(point, signs, be)
    if be.cond(F) > 1e12:
        raise NumericError("frame matrix is numerically singular")
    return be.inv(F)

"""Numerical continuation of fundamental systems in the z-plane.

Two integrators:

* :func:`integrate` is an adaptive Dormand-Prince 5(4) scheme for a
  general ``Y' = A(z) Y`` along a straight segment.
* :func:`propagate` is a Taylor-series propagator specialised to
  ``A(z) = U + μ/z``; the Taylor coefficients satisfy an exact two-term
  recursion, so each step reaches machine precision. It optionally keeps
  the columns orthonormal (QR after every step) while tracking the scale of
  the last column, which is what the Stokes matching needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError, IntegrationError
from ..precision import Backend, get_backend


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and limits shared by the integrators and the Stokes pipeline.

    ``matching_radius_policy`` is ``"least-term"`` (default) or ``"fixed"``;
    with ``"fixed"`` the radius ``matching_radius`` is used as given.
    ``formal_order`` caps the order of the formal series (default: least term).
    """

    rel_tol: float = 1e-13
    abs_tol: float = 1e-15
    max_steps: int = 100_000
    matching_radius_policy: str = "least-term"
    matching_radius: float | None = None
    base_radius: float = 1.0
    max_taylor_terms: int = 200
    max_step: float = 0.6
    formal_order: int | None = None

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ArgumentError("tolerances must be positive")
        if self.max_steps < 1:
            raise ArgumentError("max_steps must be positive")
        if self.matching_radius_policy not in ("least-term", "fixed"):
            raise ArgumentError(f"unknown matching_radius_policy {self.matching_radius_policy!r}")
        if self.matching_radius_policy == "fixed" and not self.matching_radius:
            raise ArgumentError("fixed matching radius policy needs matching_radius")
        if self.base_radius <= 0:
            raise ArgumentError("base_radius must be positive")
        if self.formal_order is not None and self.formal_order < 1:
            raise ArgumentError("formal_order must be >= 1")


# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass
class IntegrationResult:
    Y: np.ndarray
    steps: int
    rejected: int
    last_error: float


def integrate(A, z_from, z_to, Y0, cfg: IntegratorConfig | None = None,
              return_info: bool = False):
    """Integrate ``Y' = A(z) Y`` on the segment ``[z_from, z_to]``.

    Parameters
    ----------
    A : callable
        ``A(z)`` returning an ``n×n`` complex array.
    Y0 : ndarray
        Initial value, ``n×m``.
    cfg : IntegratorConfig

    Returns
    -------
    ndarray, or IntegrationResult when ``return_info``.
    """
    cfg = cfg or IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
    z0, z1 = complex(z_from), complex(z_to)
    Y = np.array(Y0, dtype=complex)
    L = abs(z1 - z0)
    if L == 0:
        res = IntegrationResult(Y, 0, 0, 0.0)
        return res if return_info else Y
    direction = (z1 - z0) / L
    s, h = 0.0, min(L, 0.05)
    steps = rejected = 0
    err = 0.0
    K = [None] * 7
    K[0] = A(z0) @ Y
    while s < L:
        if steps + rejected >= cfg.max_steps:
            raise IntegrationError(f"step limit {cfg.max_steps} reached", last_point=z0 + direction * s)
        h = min(h, L - s)
        dz = direction * h
        z = z0 + direction * s
        for i in range(1, 7):
            Yi = Y + dz * sum(a * K[j] for j, a in enumerate(_A[i]) if a)
            K[i] = A(z + _C[i] * dz) @ Yi
        Y5 = Y + dz * sum(b * k for b, k in zip(_B5, K) if b)
        Y4 = Y + dz * sum(b * k for b, k in zip(_B4, K) if b)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(Y), np.abs(Y5))
        err = float(np.sqrt(np.mean(np.abs((Y5 - Y4) / scale) ** 2)))
        if err <= 1.0:
            s += h
            Y = Y5
            K[0] = K[6]
            steps += 1
        else:
            rejected += 1
        fac = 0.9 * err ** (-0.2) if err > 0 else 5.0
        h *= min(5.0, max(0.2, fac))
        if h < 1e-14 * max(1.0, L):
            raise IntegrationError("step size underflow", last_point=z0 + direction * s)
    res = IntegrationResult(Y, steps, rejected, err)
    return res if return_info else Y


def taylor_step(U: np.ndarray, mu: np.ndarray, z0, h, Y: np.ndarray, be: Backend,
                tol: float, max_terms: int = 200) -> np.ndarray:
    """One Taylor step of ``Y' = (U + μ/z) Y`` from ``z0`` to ``z0 + h``.

    With ``Y = Σ c_m (z - z0)^m`` the equation ``z Y' = (zU + μ) Y`` gives
    ``z0 (m+1) c_{m+1} = (z0 U + μ - m) c_m + U c_{m-1}``.
    """
    c_prev = be.zeros(Y.shape)
    c = Y.copy()
    total = Y.copy()
    base = U * z0 + mu
    hp = be.scalar(1)
    prev_term = be.absmax(Y)
    for m in range(max_terms):
        cn = (base @ c - c * m + U @ c_prev) / (z0 * (m + 1))
        c_prev, c = c, cn
        hp = hp * h
        term = c * hp
        total = total + term
        t = be.absmax(term)
        ref = tol * be.absmax(total)
        if m >= 5 and t <= ref and prev_term <= ref:
            return total
        prev_term = t
    raise IntegrationError(f"Taylor series did not converge in {max_terms} terms", last_point=complex(z0))


@dataclass
class PropagationResult:
    Y: np.ndarray
    log_scale: object
    steps: int


def propagate(U: np.ndarray, mu: np.ndarray, path, Y0: np.ndarray, be: Backend | None = None,
              cfg: IntegratorConfig | None = None, orthonormalize: bool = True) -> PropagationResult:
    """Carry ``Y0`` along the polygonal ``path`` (list of points avoiding 0).

    With ``orthonormalize`` the columns are replaced by an orthonormal basis
    of the same flag after each step (thin QR with positive diagonal). The
    last column is then the true solution times ``exp(-log_scale)``.
    """
    be = be or get_backend()
    cfg = cfg or IntegratorConfig()
    U = be.asarray(U)
    mu = be.asarray(mu)
    Y = be.asarray(Y0)
    log_scale = be.scalar(0)
    steps = 0
    for za, zb in zip(path[:-1], path[1:]):
        z = be.scalar(za)
        zb = be.scalar(zb)
        while abs(zb - z) > 1e-14 * max(1.0, abs(zb)):
            if abs(z) == 0:
                raise IntegrationError("path runs into z = 0", last_point=0j)
            hmax = min(0.5 * abs(z), cfg.max_step)
            h = zb - z
            if abs(h) > hmax:
                h = h / abs(h) * hmax
            Y = taylor_step(U, mu, z, h, Y, be, cfg.rel_tol * 1e-2, cfg.max_taylor_terms)
            z = z + h
            steps += 1
            if steps > cfg.max_steps:
                raise IntegrationError(f"step limit {cfg.max_steps} reached", last_point=complex(z))
            if orthonormalize and Y.shape[1] > 0:
                Q, Rr = be.qr(Y)
                log_scale = log_scale + be.log(abs(Rr[-1, -1]))
                Y = Q
    return PropagationResult(Y, log_scale, steps)

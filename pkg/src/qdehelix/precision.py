"""Floating-point working precision.

The default is binary64 complex arithmetic through numpy. Setting the
environment variable ``QDE_PRECISION`` to ``mp:<digits>`` (e.g. ``mp:40``)
switches the numerical pipeline to mpmath numbers stored in numpy object
arrays. Exact (rational) computations never go through a backend.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import ArgumentError

ENV_VAR = "QDE_PRECISION"


@dataclass(frozen=True)
class Backend:
    name: str
    digits: int

    @property
    def is_mp(self) -> bool:
        return self.name == "mp"

    @property
    def eps(self) -> float:
        return float(np.finfo(float).eps) if not self.is_mp else 10.0 ** (-self.digits)

    @property
    def pi(self):
        return mpmath.mpf(mpmath.pi) if self.is_mp else np.pi

    # -- scalars ---------------------------------------------------------
    def scalar(self, x):
        if not self.is_mp:
            if isinstance(x, Fraction):
                return complex(x.numerator / x.denominator)
            return complex(x)
        if isinstance(x, Fraction):
            return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
        if isinstance(x, np.integer):
            return mpmath.mpc(int(x))
        if isinstance(x, np.floating):
            return mpmath.mpc(float(x))
        if isinstance(x, (mpmath.mpf, mpmath.mpc)):
            return mpmath.mpc(x)
        if isinstance(x, (np.complexfloating, complex)):
            return mpmath.mpc(complex(x).real, complex(x).imag)
        return mpmath.mpc(x)

    def exp(self, x):
        return mpmath.exp(x) if self.is_mp else np.exp(complex(x))

    def log(self, x):
        return mpmath.log(x) if self.is_mp else np.log(complex(x))

    def sqrt(self, x):
        return mpmath.sqrt(x) if self.is_mp else np.sqrt(complex(x))

    # -- arrays ----------------------------------------------------------
    def asarray(self, a) -> np.ndarray:
        a = np.asarray(a)
        if not self.is_mp:
            if a.dtype == object:
                return np.vectorize(lambda v: complex(self.scalar(v)) if isinstance(v, Fraction) else complex(v),
                                    otypes=[complex])(a)
            return a.astype(complex)
        out = np.empty(a.shape, dtype=object)
        for idx, v in np.ndenumerate(a):
            out[idx] = self.scalar(v)
        return out

    def zeros(self, shape) -> np.ndarray:
        if not self.is_mp:
            return np.zeros(shape, dtype=complex)
        out = np.empty(shape, dtype=object)
        out[...] = mpmath.mpc(0)
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.scalar(1)
        return out

    def expv(self, a: np.ndarray) -> np.ndarray:
        if not self.is_mp:
            return np.exp(a)
        return np.vectorize(mpmath.exp, otypes=[object])(a)

    def to_complex(self, a) -> np.ndarray:
        a = np.asarray(a)
        if a.dtype != object:
            return a.astype(complex)
        return np.vectorize(lambda v: complex(v), otypes=[complex])(a)

    def absmax(self, a) -> float:
        a = np.asarray(a)
        if a.size == 0:
            return 0.0
        if a.dtype != object:
            return float(np.abs(a).max())
        return float(max(abs(v) for v in a.flat))

    # -- linear algebra --------------------------------------------------
    def _mp(self, a: np.ndarray) -> mpmath.matrix:
        return mpmath.matrix(a.tolist())

    def _np(self, m: mpmath.matrix) -> np.ndarray:
        out = np.empty((m.rows, m.cols), dtype=object)
        for i in range(m.rows):
            for j in range(m.cols):
                out[i, j] = mpmath.mpc(m[i, j])
        return out

    def solve(self, A, B):
        if not self.is_mp:
            return np.linalg.solve(A, B)
        vec = np.asarray(B).ndim == 1
        Bm = np.asarray(B).reshape(len(B), -1)
        cols = [self._np(mpmath.lu_solve(self._mp(A), self._mp(Bm[:, [j]]))) for j in range(Bm.shape[1])]
        X = np.hstack(cols)
        return X[:, 0] if vec else X

    def inv(self, A):
        if not self.is_mp:
            return np.linalg.inv(A)
        return self._np(mpmath.inverse(self._mp(A)))

    def qr(self, A):
        """Thin QR with a positive real diagonal in R."""
        if not self.is_mp:
            Q, R = np.linalg.qr(A)
            d = np.diag(R)
            ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1), 1)
            return Q * ph[None, :], R / ph[:, None]
        m, k = A.shape
        Q = A.copy()
        R = self.zeros((k, k))
        # modified Gram-Schmidt, two passes
        for j in range(k):
            for _ in range(2):
                for i in range(j):
                    c = sum(mpmath.conj(Q[r, i]) * Q[r, j] for r in range(m))
                    R[i, j] += c
                    for r in range(m):
                        Q[r, j] -= c * Q[r, i]
            nrm = mpmath.sqrt(sum(abs(Q[r, j]) ** 2 for r in range(m)))
            R[j, j] = mpmath.mpc(nrm)
            for r in range(m):
                Q[r, j] /= nrm
        return Q, R

    def lstsq(self, A, b):
        if not self.is_mp:
            return np.linalg.lstsq(A, b, rcond=None)[0]
        Q, R = self.qr(A)
        rhs = np.array(
            [sum(mpmath.conj(Q[r, i]) * b[r] for r in range(Q.shape[0])) for i in range(Q.shape[1])],
            dtype=object,
        )
        k = R.shape[0]
        x = self.zeros(k)
        for i in reversed(range(k)):
            x[i] = (rhs[i] - sum(R[i, j] * x[j] for j in range(i + 1, k))) / R[i, i]
        return x

    def cond(self, A) -> float:
        Ac = self.to_complex(A)
        return float(np.linalg.cond(Ac))


def get_backend(value: str | None = None) -> Backend:
    """Return the backend selected by ``value`` or by ``QDE_PRECISION``."""
    value = value if value is not None else os.environ.get(ENV_VAR, "binary64")
    value = value.strip().lower()
    if value in ("", "binary64", "double", "float64"):
        return Backend("binary64", 16)
    if value.startswith("mp"):
        digits = value[2:].lstrip(":")
        try:
            d = int(digits)
        except ValueError:
            raise ArgumentError(f"bad {ENV_VAR} value {value!r}; expected 'binary64' or 'mp:<digits>'") from None
        if d < 16:
            raise ArgumentError(f"{ENV_VAR}: mp precision below binary64 ({d} digits) is not supported")
        mpmath.mp.dps = d
        return Backend("mp", d)
    raise ArgumentError(f"bad {ENV_VAR} value {value!r}; expected 'binary64' or 'mp:<digits>'")

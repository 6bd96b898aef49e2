"""Truncated polynomial rings, k-subset ranking and compound matrices.

Exact scalars are :class:`fractions.Fraction`; exact matrices are numpy
arrays with ``dtype=object`` holding Fractions (or ints). Floating matrices
are ``complex128`` (or object arrays of mpmath numbers under the extended
precision backend).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from numbers import Rational

import numpy as np

from .errors import ArgumentError, DimensionError, NumericError, ScalarKindError


def _is_exact(x) -> bool:
    return isinstance(x, Rational)


@dataclass(frozen=True)
class TruncatedPolynomial:
    """Element of ``K[σ]/(σ^n)`` with ``coeffs[j]`` multiplying ``σ^j``."""

    degree_bound: int
    coeffs: tuple

    def __post_init__(self):
        if self.degree_bound < 1:
            raise DimensionError("degree_bound must be >= 1")
        if len(self.coeffs) != self.degree_bound:
            raise DimensionError(f"expected {self.degree_bound} coefficients, got {len(self.coeffs)}")
        kinds = {_is_exact(c) for c in self.coeffs}
        if len(kinds) > 1:
            raise ScalarKindError("TruncatedPolynomial mixes exact and floating coefficients")
        if kinds == {True}:
            object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def from_list(cls, coeffs, n: int | None = None) -> "TruncatedPolynomial":
        coeffs = list(coeffs)
        n = len(coeffs) if n is None else n
        zero = Fraction(0) if all(_is_exact(c) for c in coeffs) else 0j
        coeffs = (coeffs + [zero] * n)[:n]
        return cls(n, tuple(coeffs))

    @classmethod
    def constant(cls, c, n: int) -> "TruncatedPolynomial":
        return cls.from_list([c], n)

    @classmethod
    def sigma(cls, n: int) -> "TruncatedPolynomial":
        """The hyperplane class σ (exact)."""
        return cls.from_list([Fraction(0), Fraction(1)], n)

    @property
    def exact(self) -> bool:
        return _is_exact(self.coeffs[0])

    def to_complex(self) -> "TruncatedPolynomial":
        return TruncatedPolynomial(self.degree_bound, tuple(complex(c) for c in self.coeffs))

    def _check(self, other: "TruncatedPolynomial"):
        if not isinstance(other, TruncatedPolynomial):
            return NotImplemented
        if other.degree_bound != self.degree_bound:
            raise DimensionError(
                f"degree bounds differ: {self.degree_bound} vs {other.degree_bound}")
        if other.exact != self.exact:
            raise ScalarKindError("cannot combine exact and floating truncated polynomials")
        return None

    def __add__(self, other):
        if (r := self._check(other)) is not None:
            return r
        return TruncatedPolynomial(self.degree_bound, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return TruncatedPolynomial(self.degree_bound, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TruncatedPolynomial):
            return poly_mul(self, other)
        if self.exact and not _is_exact(other):
            raise ScalarKindError("exact polynomial times floating scalar; convert with to_complex()")
        return TruncatedPolynomial(self.degree_bound, tuple(a * other for a in self.coeffs))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __getitem__(self, j: int):
        return self.coeffs[j]

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return self.degree_bound

    def scaled_by_powers(self, base) -> "TruncatedPolynomial":
        """Multiply the σ^j coefficient by ``base**j``."""
        return TruncatedPolynomial(self.degree_bound, tuple(c * base ** j for j, c in enumerate(self.coeffs)))

    def __repr__(self):
        terms = [f"{c}·σ^{j}" for j, c in enumerate(self.coeffs) if c != 0]
        return f"TruncatedPolynomial(n={self.degree_bound}: {' + '.join(terms) or '0'})"


def poly_mul(a: TruncatedPolynomial, b: TruncatedPolynomial) -> TruncatedPolynomial:
    """Product in ``K[σ]/(σ^n)``."""
    if a.degree_bound != b.degree_bound:
        raise DimensionError(f"degree bounds differ: {a.degree_bound} vs {b.degree_bound}")
    if a.exact != b.exact:
        raise ScalarKindError("cannot multiply exact and floating truncated polynomials")
    n = a.degree_bound
    zero = Fraction(0) if a.exact else 0j
    out = [zero] * n
    for i, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for j in range(n - i):
            out[i + j] += x * b.coeffs[j]
    return TruncatedPolynomial(n, tuple(out))


def poly_exp(a: TruncatedPolynomial) -> TruncatedPolynomial:
    """``exp(a0) · Σ_{m<n} (a - a0)^m / m!``.

    For exact input the constant term must vanish (exp of a nonzero rational
    is not rational).
    """
    n = a.degree_bound
    a0 = a.coeffs[0]
    if a.exact and a0 != 0:
        raise ArgumentError("exact poly_exp needs a zero constant term")
    nil = TruncatedPolynomial(n, (a0 * 0,) + a.coeffs[1:])
    term = TruncatedPolynomial.constant(Fraction(1) if a.exact else 1 + 0j, n)
    total = term
    for m in range(1, n):
        term = poly_mul(term, nil) * (Fraction(1, m) if a.exact else 1.0 / m)
        total = total + term
    if a.exact:
        return total
    return total * complex(np.exp(complex(a0)))


def poly_log1p(a: TruncatedPolynomial) -> TruncatedPolynomial:
    """``log(1 + a)`` for nilpotent ``a`` (zero constant term)."""
    if a.coeffs[0] != 0:
        raise ArgumentError("poly_log1p needs a zero constant term")
    n = a.degree_bound
    one = Fraction(1) if a.exact else 1.0
    term = a
    total = a
    for m in range(2, n):
        term = poly_mul(term, a)
        total = total + term * ((-one) ** (m + 1) / m)
    return total


# ---------------------------------------------------------------------------
# k-subsets


@dataclass(frozen=True)
class CompoundIndex:
    """A k-subset of {1..n} with its 1-based lexicographic rank."""

    n: int
    k: int
    subset: tuple[int, ...]
    rank: int


@lru_cache(maxsize=None)
def compound_indices(n: int, k: int) -> tuple[CompoundIndex, ...]:
    """All k-subsets of {1..n} in lexicographic order (cached per (n, k))."""
    if not 0 <= k <= n:
        raise ArgumentError(f"k={k} out of range for n={n}")
    return tuple(CompoundIndex(n, k, s, r + 1) for r, s in enumerate(combinations(range(1, n + 1), k)))


@lru_cache(maxsize=None)
def _rank_table(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {ci.subset: ci.rank for ci in compound_indices(n, k)}


def subset_rank(subset, n: int) -> int:
    subset = tuple(subset)
    return _rank_table(n, len(subset))[subset]


# ---------------------------------------------------------------------------
# determinants and compounds


def exact_det(M) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    A = [[Fraction(x) for x in row] for row in np.asarray(M, dtype=object)]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        inv = 1 / A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] * inv
            if f:
                for j in range(c, n):
                    A[r][j] -= f * A[c][j]
    return det


def exact_inv(M) -> np.ndarray:
    """Inverse over the rationals (object array of Fractions)."""
    A = [[Fraction(x) for x in row] for row in np.asarray(M, dtype=object)]
    n = len(A)
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            raise NumericError("matrix is singular")
        A[c], A[p] = A[p], A[c]
        inv[c], inv[p] = inv[p], inv[c]
        piv = A[c][c]
        A[c] = [x / piv for x in A[c]]
        inv[c] = [x / piv for x in inv[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[c])]
    return np.array(inv, dtype=object)


def as_exact(M) -> np.ndarray:
    return np.vectorize(Fraction, otypes=[object])(np.asarray(M, dtype=object))


def _generic_det(M: np.ndarray):
    """Partial-pivoting elimination for object arrays of floating numbers."""
    A = [list(r) for r in M]
    n = len(A)
    det = 1
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(A[r][c]))
        if A[p][c] == 0:
            return 0 * det
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            for j in range(c, n):
                A[r][j] -= f * A[c][j]
    return det


def _det(M: np.ndarray):
    if M.dtype != object:
        return np.linalg.det(M)
    if all(_is_exact(x) for x in M.flat):
        return exact_det(M)
    return _generic_det(M)


def _check_square(A, k):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError("matrix must be square")
    n = A.shape[0]
    if not 0 < k <= n:
        raise ArgumentError(f"k={k} out of range for a {n}x{n} matrix")
    return A, n


def compound_matrix(A, k: int) -> np.ndarray:
    """Matrix of k×k minors, rows/columns in lexicographic subset order."""
    A, n = _check_square(A, k)
    subsets = [tuple(i - 1 for i in ci.subset) for ci in compound_indices(n, k)]
    N = len(subsets)
    if k == 1:
        return A.copy()
    if A.dtype != object:
        idx = np.array(subsets)
        minors = A[idx[:, None, :, None], idx[None, :, None, :]]
        return np.linalg.det(minors)
    out = np.empty((N, N), dtype=object)
    for a, I in enumerate(subsets):
        for b, J in enumerate(subsets):
            out[a, b] = _det(A[np.ix_(I, J)])
    return out


def additive_compound(A, k: int) -> np.ndarray:
    """Derivative at ε=0 of ``compound_matrix(I + εA, k)``."""
    A, n = _check_square(A, k)
    subsets = [tuple(i - 1 for i in ci.subset) for ci in compound_indices(n, k)]
    N = len(subsets)
    zero = A.flat[0] * 0
    out = np.empty((N, N), dtype=A.dtype)
    out[...] = zero
    pos = [{v: p for p, v in enumerate(I)} for I in subsets]
    for a, I in enumerate(subsets):
        sI = set(I)
        for b, J in enumerate(subsets):
            sJ = set(J)
            if a == b:
                out[a, b] = sum((A[i, i] for i in I), zero)
                continue
            dI = sI - sJ
            if len(dI) != 1:
                continue
            (i,) = dI
            (j,) = sJ - sI
            sign = -1 if (pos[a][i] + pos[b][j]) % 2 else 1
            out[a, b] = sign * A[i, j]
    return out


def binomial(n: int, k: int) -> int:
    return comb(n, k)


def truncated_exp_coeffs(x, n: int) -> list:
    """Coefficients ``x^j / j!`` for j < n."""
    return [x ** j / factorial(j) for j in range(n)]

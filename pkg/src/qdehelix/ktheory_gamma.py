"""Exact K-theory of projective space and the Gamma-class morphism.

A class in ``K₀(P^{n-1}) ⊗ Q`` is stored through its Chern character, a
truncated polynomial in the hyperplane class σ with rational coefficients.
Euler pairings come from Hirzebruch-Riemann-Roch and are exact integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial

import mpmath
import numpy as np

from .errors import ArgumentError, BasisError, DimensionError, InternalConsistencyError
from .precision import Backend, get_backend
from .ring_core import TruncatedPolynomial, exact_inv, poly_mul

# Euler-Mascheroni constant and zeta values, 36 significant digits.
EULER_GAMMA = "0.577215664901532860606512090082402431"
ZETA = {
    2: "1.64493406684822643647241516664602519",
    3: "1.20205690315959428539973816151144999",
    4: "1.08232323371113819151600369654116790",
    5: "1.03692775514336992633136548645703417",
    6: "1.01734306198444913971451792979092053",
    7: "1.00834927738192282683979754984979676",
}


def zeta_value(m: int, be: Backend | None = None):
    be = be or get_backend("binary64")
    if be.is_mp:
        return mpmath.zeta(m)
    return float(ZETA[m]) if m in ZETA else float(mpmath.zeta(m))


def euler_gamma(be: Backend | None = None):
    be = be or get_backend("binary64")
    return mpmath.euler if be.is_mp else float(EULER_GAMMA)


@dataclass(frozen=True)
class KClass:
    """K-theory class on ``P^{n-1}`` represented by its Chern character."""

    n: int
    ch: TruncatedPolynomial
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.ch.degree_bound != self.n:
            raise DimensionError(f"ch has degree bound {self.ch.degree_bound}, expected {self.n}")
        if not self.ch.exact:
            raise ArgumentError("KClass needs an exact Chern character")
        if self.ch[0].denominator != 1:
            raise ArgumentError(f"rank {self.ch[0]} is not an integer")

    @property
    def rank(self) -> int:
        return int(self.ch[0])

    def _same(self, other: "KClass"):
        if other.n != self.n:
            raise DimensionError("classes live on different projective spaces")

    def __add__(self, other: "KClass") -> "KClass":
        self._same(other)
        return KClass(self.n, self.ch + other.ch, f"{self.label}+{other.label}")

    def __neg__(self) -> "KClass":
        return KClass(self.n, -self.ch, f"-{self.label}" if self.label else "")

    def __sub__(self, other: "KClass") -> "KClass":
        self._same(other)
        return KClass(self.n, self.ch - other.ch, f"{self.label}-{other.label}")

    def __rmul__(self, k) -> "KClass":
        if int(k) != k:
            raise ArgumentError("K-classes are scaled by integers only")
        k = int(k)
        return KClass(self.n, self.ch * Fraction(k), f"{k}·{self.label}" if k not in (1, -1) else
                      (self.label if k == 1 else f"-{self.label}"))

    def __mul__(self, other: "KClass") -> "KClass":
        """Tensor product."""
        self._same(other)
        return KClass(self.n, poly_mul(self.ch, other.ch), f"{self.label}⊗{other.label}")

    def twist(self, j: int) -> "KClass":
        """``x ⊗ O(j)``."""
        return KClass(self.n, poly_mul(self.ch, chern_character_line(j, self.n).ch),
                      f"{self.label}({j})" if self.label else "")

    def dual(self) -> "KClass":
        c = tuple(x if j % 2 == 0 else -x for j, x in enumerate(self.ch.coeffs))
        return KClass(self.n, TruncatedPolynomial(self.n, c), f"{self.label}^∨")

    def vector(self) -> np.ndarray:
        return np.array(self.ch.coeffs, dtype=object)

    def relabel(self, label: str) -> "KClass":
        return KClass(self.n, self.ch, label)

    def __repr__(self):
        return f"KClass({self.label or '?'}, ch={list(map(str, self.ch.coeffs))})"


def chern_character_line(k: int, n: int) -> KClass:
    """``ch O(k) = exp(kσ)`` truncated."""
    return KClass(n, TruncatedPolynomial(n, tuple(Fraction(k) ** j / factorial(j) for j in range(n))),
                  f"O({k})" if k else "O")


def structure_sheaf(n: int) -> KClass:
    return chern_character_line(0, n)


def tangent_class(n: int) -> KClass:
    """``ch T = n·e^σ - 1`` (Euler sequence)."""
    if n < 2:
        raise DimensionError("tangent_class needs n >= 2")
    c = [Fraction(n) / factorial(j) for j in range(n)]
    c[0] -= 1
    return KClass(n, TruncatedPolynomial(n, tuple(c)), "T")


def adams(x: KClass, k: int) -> TruncatedPolynomial:
    """``ψ^k``: multiply the σ^j component of ch by ``k^j``."""
    return x.ch.scaled_by_powers(Fraction(k))


def lambda_power(x: KClass, p: int) -> KClass:
    """``ch(∧^p x)`` by Newton's identities ``p λ^p = Σ_{i=1..p} (-1)^{i-1} ψ^i λ^{p-i}``."""
    if p < 0:
        raise ArgumentError("p must be non-negative")
    if p > x.rank:
        raise ArgumentError(f"p={p} exceeds rank {x.rank}")
    n = x.n
    lam = [TruncatedPolynomial.constant(Fraction(1), n)]
    for q in range(1, p + 1):
        s = TruncatedPolynomial.constant(Fraction(0), n)
        for i in range(1, q + 1):
            term = poly_mul(adams(x, i), lam[q - i])
            s = s + (term if i % 2 == 1 else -term)
        lam.append(s * Fraction(1, q))
    label = f"∧^{p}{x.label}" if p > 1 else (x.label if p == 1 else "O")
    return KClass(n, lam[p], label)


def todd_class(n: int) -> TruncatedPolynomial:
    """``(σ/(1-e^{-σ}))^n`` mod σ^n."""
    if n < 1:
        raise DimensionError("n must be >= 1")
    # σ/(1-e^{-σ}) = 1/(Σ_{j≥0} (-1)^j σ^j/(j+1)!)
    d = [Fraction((-1) ** j, factorial(j + 1)) for j in range(n)]
    inv = [Fraction(0)] * n
    inv[0] = Fraction(1)
    for m in range(1, n):
        inv[m] = -sum(d[i] * inv[m - i] for i in range(1, m + 1))
    base = TruncatedPolynomial(n, tuple(inv))
    out = TruncatedPolynomial.constant(Fraction(1), n)
    for _ in range(n):
        out = poly_mul(out, base)
    return out


def chi_pair(E: KClass, F: KClass) -> int:
    """``χ(E, F) = ∫ ch(E)^∨ ch(F) td`` (top coefficient), asserted integral."""
    if E.n != F.n:
        raise DimensionError("classes live on different projective spaces")
    n = E.n
    val = poly_mul(poly_mul(E.dual().ch, F.ch), todd_class(n))[n - 1]
    if val.denominator != 1:
        raise InternalConsistencyError(f"χ({E.label}, {F.label}) = {val} is not an integer")
    return int(val)


def _gram(classes) -> np.ndarray:
    n = len(classes)
    G = np.zeros((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            G[i, j] = chi_pair(classes[i], classes[j])
    return G


def exceptionality_violations(G) -> list[tuple[int, int]]:
    n = G.shape[0]
    bad = [(i + 1, i + 1) for i in range(n) if G[i, i] != 1]
    bad += [(j + 1, i + 1) for i in range(n) for j in range(i + 1, n) if G[j, i] != 0]
    return bad


class ExceptionalBasis:
    """Ordered K-classes whose Gram matrix is upper unitriangular."""

    def __init__(self, classes, check: bool = True):
        classes = tuple(classes)
        if not classes:
            raise DimensionError("empty basis")
        if len({c.n for c in classes}) != 1:
            raise DimensionError("classes live on different projective spaces")
        if len(classes) != classes[0].n:
            raise DimensionError(f"a full basis of K(P^{classes[0].n - 1}) has {classes[0].n} classes")
        self.classes = classes
        if check:
            bad = exceptionality_violations(self.gram)
            if bad:
                raise BasisError(f"not exceptional at entries {bad}", offending=bad)

    @property
    def n(self) -> int:
        return self.classes[0].n

    @cached_property
    def gram(self) -> np.ndarray:
        return _gram(self.classes)

    @property
    def labels(self) -> list[str]:
        return [c.label for c in self.classes]

    def ch_matrix(self) -> np.ndarray:
        """Exact matrix whose column j is ``ch(e_j)``."""
        return np.stack([c.vector() for c in self.classes], axis=1)

    def __len__(self):
        return len(self.classes)

    def __getitem__(self, i):
        return self.classes[i]

    def __eq__(self, other):
        return isinstance(other, ExceptionalBasis) and self.classes == other.classes

    def __repr__(self):
        return f"ExceptionalBasis({', '.join(self.labels)})"


def gram_matrix(basis: ExceptionalBasis) -> np.ndarray:
    """Integer matrix ``χ(e_i, e_j)``; raises BasisError if not exceptional."""
    G = basis.gram
    bad = exceptionality_violations(G)
    if bad:
        raise BasisError(f"not exceptional at entries {bad}", offending=bad)
    return G.astype(object)


def beilinson_basis(n: int) -> ExceptionalBasis:
    return ExceptionalBasis([chern_character_line(k, n) for k in range(n)])


def mutate(basis: ExceptionalBasis, i: int, side: str = "left") -> ExceptionalBasis:
    """Left or right mutation of the pair at positions ``i, i+1`` (1-based)."""
    n = len(basis)
    if not 1 <= i <= n - 1:
        raise ArgumentError(f"mutation index {i} outside 1..{n - 1}")
    c = list(basis.classes)
    a, b = c[i - 1], c[i]
    chi = chi_pair(a, b)
    if side == "left":
        new = b - chi * a if chi else b
        new = new.relabel(f"L({a.label},{b.label})" if chi else b.label)
        c[i - 1], c[i] = new, a
    elif side == "right":
        new = a - chi * b if chi else a
        new = new.relabel(f"R({a.label},{b.label})" if chi else a.label)
        c[i - 1], c[i] = b, new
    else:
        raise ArgumentError(f"side must be 'left' or 'right', got {side!r}")
    try:
        return ExceptionalBasis(c)
    except BasisError as e:
        raise InternalConsistencyError(f"mutation broke exceptionality: {e}") from e


def predicted_collection(n: int) -> ExceptionalBasis:
    """Exceptional collection of bundles built from twists of exterior powers of T.

    n even: ``O(n/2), T(n/2-1), O(n/2+1), ∧³T(n/2-2), …, O(n-1), ∧^{n-1}T``;
    n odd:  ``O((n-1)/2), O((n+1)/2), ∧²T((n-3)/2), …, O(n-1), ∧^{n-1}T``.
    """
    if n < 2:
        raise DimensionError("predicted_collection needs n >= 2")
    T = tangent_class(n)
    out = []

    def ext(p, j):
        x = lambda_power(T, p).twist(j)
        name = "T" if p == 1 else f"∧^{p}T"
        return x.relabel(name if j == 0 else f"{name}({j})")

    if n % 2 == 0:
        for i in range(n // 2):
            out.append(chern_character_line(n // 2 + i, n))
            out.append(ext(2 * i + 1, n // 2 - 1 - i))
    else:
        out.append(chern_character_line((n - 1) // 2, n))
        for i in range((n - 1) // 2):
            out.append(chern_character_line((n + 1) // 2 + i, n))
            out.append(ext(2 * i + 2, (n - 3) // 2 - i))
    return ExceptionalBasis(out)


# ---------------------------------------------------------------------------
# characteristic classes


@dataclass(frozen=True)
class GammaData:
    n: int
    gamma_minus: TruncatedPolynomial
    todd: TruncatedPolynomial


def _float_poly(vals, n, be):
    return [be.scalar(v) for v in vals] + [be.scalar(0)] * (n - len(vals))


def _series_exp(a, n, be):
    """exp of a truncated series with zero constant term (list of backend scalars)."""
    out = [be.scalar(0)] * n
    out[0] = be.scalar(1)
    term = list(out)
    for m in range(1, n):
        new = [be.scalar(0)] * n
        for i, x in enumerate(term):
            if x == 0:
                continue
            for j in range(1, n - i):
                new[i + j] += x * a[j]
        term = [x / m for x in new]
        out = [x + y for x, y in zip(out, term)]
    return out


def _series_mul(a, b, n, be):
    out = [be.scalar(0)] * n
    for i, x in enumerate(a):
        for j in range(n - i):
            out[i + j] += x * b[j]
    return out


def gamma_minus_coeffs(n: int, be: Backend | None = None) -> list:
    """``Γ̂⁻ = exp(n(γσ + Σ_{m=2}^{n-1} ζ(m)/m σ^m))`` as backend scalars."""
    be = be or get_backend("binary64")
    a = [be.scalar(0)] * n
    if n > 1:
        a[1] = n * be.scalar(euler_gamma(be))
    for m in range(2, n):
        a[m] = n * be.scalar(zeta_value(m, be)) / m
    return _series_exp(a, n, be)


def gamma_minus(n: int) -> GammaData:
    if n < 1:
        raise DimensionError("n must be >= 1")
    be = get_backend("binary64")
    g = gamma_minus_coeffs(n, be)
    return GammaData(n, TruncatedPolynomial(n, tuple(complex(x) for x in g)), todd_class(n))


def graded_ch(x: KClass) -> TruncatedPolynomial:
    """``Ch``: σ^j coefficient of ch multiplied by ``(2πi)^j``."""
    return x.ch.to_complex().scaled_by_powers(2j * np.pi)


def dubrovin_ch_matrix(n: int, be: Backend | None = None) -> np.ndarray:
    """Matrix of ``ch ↦ Д⁻`` (columns: images of the unit vectors σ^j of ch)."""
    be = be or get_backend("binary64")
    d = n - 1
    pi = be.pi
    pref = (1j) ** (d % 2) / (2 * pi) ** (be.scalar(d) / 2)
    g = gamma_minus_coeffs(n, be)
    e = [be.scalar(0)] * n
    if n > 1:
        e[1] = -1j * pi * n
    ec = _series_exp(e, n, be)
    ge = _series_mul(g, ec, n, be)
    M = be.zeros((n, n))
    for j in range(n):
        w = (2j * pi) ** j
        for i in range(j, n):
            M[i, j] = pref * ge[i - j] * w
    return M


def dubrovin_morphism(basis, be: Backend | None = None) -> np.ndarray:
    """Column j holds the σ-coordinates of ``Д⁻(e_j)``.

    ``Д⁻(F) = i^{d mod 2} (2π)^{-d/2} Γ̂⁻ exp(-πi c₁) Ch(F)`` with d = n-1, c₁ = nσ.
    Accepts an ExceptionalBasis or any sequence of KClass.
    """
    be = be or get_backend("binary64")
    classes = basis.classes if isinstance(basis, ExceptionalBasis) else tuple(basis)
    n = classes[0].n
    D = dubrovin_ch_matrix(n, be)
    chm = np.stack([be.asarray(np.array(c.ch.coeffs, dtype=object)) for c in classes], axis=1)
    return D @ chm


def kappa(x: KClass) -> KClass:
    """Canonical operator ``[F] ↦ (-1)^{n-1}[F ⊗ O(-n)]``."""
    y = x.twist(-x.n)
    y = y if (x.n - 1) % 2 == 0 else -y
    return y.relabel(f"κ({x.label})")


def kappa_ch_matrix(n: int) -> np.ndarray:
    """Exact (rational) matrix of κ on ch-coordinates."""
    cols = []
    for j in range(n):
        e = [Fraction(0)] * n
        e[j] = Fraction(1)
        e[0] = e[0]
        cols.append(list(poly_mul(TruncatedPolynomial(n, tuple(e)), chern_character_line(-n, n).ch).coeffs))
    M = np.array(cols, dtype=object).T
    return M * ((-1) ** (n - 1))


def kappa_matrix(n: int, basis: ExceptionalBasis | None = None) -> np.ndarray:
    """Integer matrix of κ in an exceptional basis (default: O, O(1), …, O(n-1)).

    Column j holds the coordinates of ``κ(e_j)``.
    """
    basis = basis or beilinson_basis(n)
    B = basis.ch_matrix()
    M = exact_inv(B) @ kappa_ch_matrix(n) @ B
    if any(Fraction(x).denominator != 1 for x in M.flat):
        raise InternalConsistencyError("κ is not integral in the given basis")
    return np.vectorize(int, otypes=[object])(M)


def helix_connection(C, M0, m: int, be: Backend | None = None) -> np.ndarray:
    """``M₀^{-m}·C``."""
    be = be or get_backend()
    C = be.asarray(C)
    M = be.asarray(M0)
    if m == 0:
        return C.copy()
    base = be.inv(M) if m > 0 else M
    out = C
    for _ in range(abs(m)):
        out = base @ out
    return out


def helix_shift(basis: ExceptionalBasis, m: int) -> ExceptionalBasis:
    """Apply ``κ^m`` to every class (negative m uses κ⁻¹)."""
    n = basis.n
    classes = []
    for c in basis.classes:
        x = c
        for _ in range(abs(m)):
            if m > 0:
                x = kappa(x)
            else:
                y = x.twist(n)
                x = (y if (n - 1) % 2 == 0 else -y).relabel(f"κ⁻¹({x.label})")
        classes.append(x.relabel(c.label if m == 0 else f"κ^{m}({c.label})"))
    return ExceptionalBasis(classes)

"""Braid-group action on monodromy data and orbit search against K-theory.

Generator ``β_i`` acts by ``(S, C) ↦ (A S A, C A⁻¹)`` with ``A = A^{β_i}(S)``.
On exceptional bases it corresponds to the left mutation ``L_i``, with the
bookkeeping ``S = Gram⁻¹`` and ``C = Д⁻(basis)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ArgumentError, NotFoundError, NumericError
from .ktheory_gamma import ExceptionalBasis, dubrovin_morphism, mutate
from .qde_engine.monodromy import monodromy_m0
from .frobenius_p import c1_matrix, mu_values
from .ring_core import exact_inv


@dataclass(frozen=True)
class BraidWord:
    """Sequence of generators ``(i, ε)``; ``ε = +1`` is β_i, ``ε = -1`` its inverse."""

    letters: tuple = ()

    def __post_init__(self):
        letters = tuple((int(i), int(e)) for i, e in self.letters)
        for i, e in letters:
            if i < 1 or e not in (1, -1):
                raise ArgumentError(f"bad generator ({i}, {e})")
        object.__setattr__(self, "letters", letters)

    def check(self, n: int) -> "BraidWord":
        for i, _ in self.letters:
            if i > n - 1:
                raise ArgumentError(f"generator index {i} out of range for n={n}")
        return self

    def inverse(self) -> "BraidWord":
        return BraidWord(tuple((i, -e) for i, e in reversed(self.letters)))

    def __add__(self, other: "BraidWord") -> "BraidWord":
        return BraidWord(self.letters + other.letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self):
        if not self.letters:
            return "id"
        return " ".join(f"b{i}" if e == 1 else f"b{i}^-1" for i, e in self.letters)

    @classmethod
    def parse(cls, text: str) -> "BraidWord":
        text = text.strip()
        if text in ("", "id"):
            return cls(())
        letters = []
        for tok in text.replace(",", " ").split():
            tok = tok.lower().lstrip("b")
            if tok.endswith("^-1"):
                letters.append((int(tok[:-3]), -1))
            elif tok.startswith("-"):
                letters.append((int(tok[1:]), -1))
            else:
                letters.append((int(tok), 1))
        return cls(tuple(letters))


def _is_exact(M) -> bool:
    M = np.asarray(M)
    return M.dtype == object and all(isinstance(x, (int, Fraction)) for x in M.flat)


def _ident(n, exact):
    if exact:
        I = np.zeros((n, n), dtype=object)
        I[...] = Fraction(0)
        for k in range(n):
            I[k, k] = Fraction(1)
        return I
    return np.eye(n, dtype=complex)


def a_matrix(U, i: int) -> np.ndarray:
    """``A^{β_i}(U)``: identity off the block, block ``[[0, 1], [1, -U_{i,i+1}]]`` (1-based i)."""
    U = np.asarray(U)
    n = U.shape[0]
    if not 1 <= i <= n - 1:
        raise ArgumentError(f"generator index {i} outside 1..{n - 1}")
    A = _ident(n, _is_exact(U))
    a, b = i - 1, i
    A[a, a] = A[a, a] * 0
    A[a, b] = A[a, b] * 0 + 1
    A[b, a] = A[b, a] * 0 + 1
    A[b, b] = -U[a, b]
    return A


def a_inverse(U_after, i: int) -> np.ndarray:
    """Inverse of ``A^{β_i}(U)`` written in terms of ``U' = A U A``: block ``[[-U'_{i,i+1}, 1], [1, 0]]``."""
    U_after = np.asarray(U_after)
    n = U_after.shape[0]
    if not 1 <= i <= n - 1:
        raise ArgumentError(f"generator index {i} outside 1..{n - 1}")
    B = _ident(n, _is_exact(U_after))
    a, b = i - 1, i
    B[a, a] = -U_after[a, b]
    B[a, b] = B[a, b] * 0 + 1
    B[b, a] = B[b, a] * 0 + 1
    B[b, b] = B[b, b] * 0
    return B


def _unitri_defect(S) -> float:
    S = np.asarray(S)
    n = S.shape[0]
    return max([float(abs(S[k, k] - 1)) for k in range(n)]
               + [float(abs(S[r, c])) for r in range(n) for c in range(r)] + [0.0])


def braid_act(S, C, word: BraidWord, check_tol: float = 1e-9):
    """Apply ``word`` left to right to ``(S, C)``.

    ``C`` may be ``None`` when only the Stokes side is wanted. Exact (object
    Fraction) inputs stay exact.
    """
    S = np.array(S, dtype=object if _is_exact(S) else complex)
    C = None if C is None else np.array(C, dtype=object if _is_exact(C) else complex)
    n = S.shape[0]
    word.check(n)
    for i, e in word:
        if e == 1:
            A = a_matrix(S, i)
            S_new = A @ S @ A
            Ainv = a_inverse(S_new, i)
        else:
            # β_i^{-1}: S = B S_new B with B = A^{-1} expressed through S
            B = a_inverse(S, i)
            S_new = B @ S @ B
            Ainv = a_matrix(S_new, i)
        S = S_new
        if C is not None:
            C = C @ Ainv
    if _unitri_defect(S) > check_tol:
        raise NumericError(f"braid action left S non-unitriangular (defect {_unitri_defect(S):.3g})")
    return S, C


def mutate_word(basis: ExceptionalBasis, word: BraidWord) -> ExceptionalBasis:
    """Apply ``L_i`` for β_i and ``R_i`` for β_i⁻¹, left to right."""
    word.check(len(basis))
    for i, e in word:
        basis = mutate(basis, i, "left" if e == 1 else "right")
    return basis


def mutation_consistency(basis: ExceptionalBasis, word: BraidWord) -> int:
    """Max entrywise |Gram(mutated basis) - (braid_act(Gram⁻¹))⁻¹| in exact arithmetic."""
    G = basis.gram
    S = exact_inv(G)
    S_new, _ = braid_act(S, None, word)
    G_from_act = exact_inv(S_new)
    G_mut = mutate_word(basis, word).gram
    diff = max(abs(Fraction(a) - Fraction(b)) for a, b in zip(G_from_act.flat, G_mut.flat))
    return int(diff) if diff.denominator == 1 else float(diff)


@dataclass
class MatchResult:
    word: BraidWord
    signs: tuple
    helix_shift: int
    residual: float
    permutation: tuple | None = None
    basis: ExceptionalBasis | None = None
    residual_S: float = 0.0
    residual_C: float = 0.0
    candidates: int = 0
    details: dict = field(default_factory=dict)


def _generators(n: int):
    for i in range(1, n):
        yield (i, 1)
        yield (i, -1)


def braid_words(n: int, depth: int):
    """Freely reduced words in canonical order: length, then lexicographic."""
    gens = list(_generators(n))
    yield BraidWord(())
    frontier = [()]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for g in gens:
                if w and w[-1] == (g[0], -g[1]):
                    continue
                nxt.append(w + (g,))
        for w in nxt:
            yield BraidWord(w)
        frontier = nxt


def _sign_table(n: int) -> np.ndarray:
    return np.array(list(itertools.product((1, -1), repeat=n)), dtype=float)


def _best_signs(S_pred, C_pred, S_num, C_num, table):
    SS = table[:, :, None] * table[:, None, :] * S_pred[None]
    rS = np.abs(SS - S_num[None]).reshape(len(table), -1).max(axis=1)
    CC = C_pred[None] * table[:, None, :]
    rC = np.abs(CC - C_num[None]).reshape(len(table), -1).max(axis=1)
    r = np.maximum(rS, rC)
    k = int(np.argmin(r))
    return k, float(r[k]), float(rS[k]), float(rC[k])


def orbit_match(S_num, C_num, predicted: ExceptionalBasis, depth: int = 6, tol: float = 1e-6,
                helix_range=range(-2, 3), permutations: bool = False, max_sign_n: int = 8,
                dedupe: bool = True) -> MatchResult:
    """Search braid words, column signs and helix shifts matching ``(S_num, C_num)``.

    Candidates are visited in canonical order (word length, then
    lexicographic over ``(1,+), (1,-), (2,+), …``; helix shifts in the
    order given; signs in binary order) and the first one with residual
    below ``tol`` is returned.

    Raises
    ------
    NotFoundError
        With the best residual and word seen.
    """
    S_num = np.asarray(S_num, dtype=complex)
    C_num = np.asarray(C_num, dtype=complex)
    n = S_num.shape[0]
    if _unitri_defect(S_num) > max(tol, 1e-6):
        raise ArgumentError("S_num is not unitriangular")
    if n > max_sign_n:
        raise ArgumentError(f"exhaustive sign search is limited to n <= {max_sign_n}")
    mu = np.diag([float(m) for m in mu_values(n)])
    M0 = monodromy_m0(mu, c1_matrix(n))
    helix = list(helix_range)
    helix_mats = {m: (np.linalg.matrix_power(np.linalg.inv(M0), m) if m >= 0
                      else np.linalg.matrix_power(M0, -m)) for m in helix}
    table = _sign_table(n)
    perms = list(itertools.permutations(range(n))) if permutations else [tuple(range(n))]
    best = (np.inf, None)
    seen = set()
    count = 0
    cache: dict = {(): predicted}
    for word in braid_words(n, depth):
        parent = cache.get(word.letters[:-1]) if word.letters else None
        basis = predicted if not word.letters else (
            mutate(parent, word.letters[-1][0], "left" if word.letters[-1][1] == 1 else "right")
            if parent is not None else None)
        if basis is None:
            continue
        key = tuple(c.ch.coeffs for c in basis.classes)
        if dedupe and key in seen:
            continue
        seen.add(key)
        if len(word) < depth:
            cache[word.letters] = basis
        S_pred = np.array(exact_inv(basis.gram), dtype=float)
        D = dubrovin_morphism(basis)
        for m in helix:
            Cm = helix_mats[m] @ D
            for perm in perms:
                P = list(perm)
                Sp = S_pred[np.ix_(P, P)]
                Cp = Cm[:, P]
                k, r, rS, rC = _best_signs(Sp, Cp, S_num, C_num, table)
                count += len(table)
                if r < best[0]:
                    best = (r, word)
                if r < tol:
                    signs = tuple(int(x) for x in table[k])
                    return MatchResult(word, signs, m, r, None if not permutations else tuple(perm),
                                       basis, rS, rC, count)
    raise NotFoundError(f"no match within depth {depth}: best residual {best[0]:.3g} at word {best[1]}",
                        best_residual=float(best[0]), best_word=best[1])

"""Recover exceptional collections from numerically computed Stokes data.

For each projective space up to dimension 4, the Stokes matrix and the
central connection are computed at t = 0 and matched against the braid
group orbit of a reference exceptional collection. The inverse Stokes
matrix should round to the Gram matrix of the matched collection (after
column sign changes) and C should equal its gamma-class matrix.

Run with ``python3 demos/gram_from_stokes.py``.
"""
from __future__ import annotations

import math

import numpy as np

from qdehelix import SmallQHPoint, dubrovin_morphism, monodromy_data, orbit_match, predicted_collection

for n in range(2, 6):
    point = SmallQHPoint(n, 0.0)
    data = monodromy_data(point, math.pi / (2 * n))
    basis = predicted_collection(n)
    match = orbit_match(data.S, data.C, basis, depth=6)
    D = np.diag(match.signs)
    gram = D @ np.array(match.basis.gram, dtype=np.int64) @ D
    S_inv = np.linalg.inv(data.S)
    deviation = np.abs(S_inv - np.rint(S_inv.real)).max()
    exact = np.array_equal(np.rint(S_inv.real).astype(np.int64), gram)
    c_err = np.abs(data.C - dubrovin_morphism(match.basis) @ D).max()
    print(f"P^{n - 1}: collection {match.basis.labels}")
    print(f"  word '{match.word}', signs {match.signs}, helix shift {match.helix_shift}")
    print(f"  round(S^-1) == signed Gram: {exact} (pre-rounding deviation {deviation:.1e})")
    print(f"  |C - gamma-class matrix| = {c_err:.1e}")
    if n == 3:
        print("  Gram matrix:")
        print("  " + str(gram).replace("\n", "\n  "))

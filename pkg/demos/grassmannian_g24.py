"""The Grassmannian of 2-planes in C^4 from the projective 3-space.

The Stokes data of G(2,4) are obtained in two ways: as second exterior
powers of the projective data at the shifted point t + pi*i, and by
running the Stokes pipeline directly on the Grassmannian system. Their
agreement, and the integral Gram matrix, are printed.

Run with ``python3 demos/grassmannian_g24.py``.
"""
from __future__ import annotations

import math

import numpy as np

from qdehelix import grassmannian_direct, grassmannian_monodromy, orbit_match, predicted_collection
from qdehelix.satake_g import gram_wedge_identity, schubert_basis

k, n, phi = 2, 4, math.pi / 8
G = schubert_basis(k, n)
print("Schubert classes:", G.labels)

compound = grassmannian_monodromy(k, n, 0.0, phi)
direct = grassmannian_direct(k, n, 0.0, phi)
dS = np.abs(compound.monodromy.S - direct.monodromy.S).max()
dC = np.abs(compound.monodromy.C - direct.monodromy.C).max()
print(f"direct vs exterior power: |dS| = {dS:.1e}, |dC| = {dC:.1e}")
print("constraint residuals (direct):",
      {key: f"{v:.1e}" for key, v in direct.monodromy.residuals.items()})

P = compound.projective
match = orbit_match(P.S, P.C, predicted_collection(n), depth=4)
D = np.diag(np.array(match.signs, dtype=object))
gram_P = D @ np.array(match.basis.gram, dtype=object) @ D
gram_G = gram_wedge_identity(gram_P, k)
rounded = np.rint(np.linalg.inv(direct.monodromy.S).real).astype(np.int64)
print(f"projective match: word '{match.word}', signs {match.signs}")
print("Gram matrix of G(2,4) from the exterior square:")
print(np.array(gram_G, dtype=np.int64))
print("round(S^-1) agrees:", np.array_equal(rounded, np.array(gram_G, dtype=np.int64)))

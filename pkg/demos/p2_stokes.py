"""Stokes data of the projective plane, step by step.

Builds the joint system at t = 0, picks an admissible direction, computes
the Stokes matrix S and the central connection C, and checks the
monodromy constraints.

Run with ``python3 demos/p2_stokes.py``.
"""
from __future__ import annotations

import math

import numpy as np

from qdehelix import SmallQHPoint, build_system_p, canonical_coordinates, monodromy_data
from qdehelix.frobenius_p import ray_directions

np.set_printoptions(precision=6, suppress=True, linewidth=110)

point = SmallQHPoint(3, 0.0)
system = build_system_p(point)
print("Multiplication by c1 at q = 1:")
print(system.U)
print("Grading operator mu:", np.diag(np.asarray(system.mu, dtype=float)))

phi = math.pi / 6
u, order = canonical_coordinates(point, phi)
print("\nCanonical coordinates in lexicographic order:", np.round(u, 6))
print("Stokes ray directions:", np.round(ray_directions(u), 6))
print(f"Chosen direction phi = pi/6 = {phi:.6f}, permutation {[int(i) for i in order]}")

data = monodromy_data(point, phi)
print("\nStokes matrix S (upper unitriangular, integer entries up to sign):")
print(data.S)
print("Central connection C:")
print(data.C)
print("\nConstraint residuals:")
for name, value in data.residuals.items():
    print(f"  {name:18s} {value:.2e}")
print("\nround(S^-1):")
print(np.rint(np.linalg.inv(data.S).real).astype(int))

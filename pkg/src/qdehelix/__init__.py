"""Stokes data of quantum differential equations and exceptional collections.

Numerical monodromy data ``(μ, R, S, C)`` of the quantum differential
equation of ℙⁿ⁻¹ and of Grassmannians, together with the exact K-theoretic
side (exceptional bases, Gram matrices, the Γ-class map) and the braid-group
search that compares the two.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .braid_orbit import BraidWord, MatchResult, braid_act, orbit_match
from .errors import QDEError
from .frobenius_p import SmallQHPoint, build_system_p, canonical_coordinates, psi_matrix
from .ktheory_gamma import (ExceptionalBasis, beilinson_basis, dubrovin_morphism, gram_matrix, mutate,
                            predicted_collection)
from .precision import get_backend
from .qde_engine import IntegratorConfig, MonodromyData, monodromy_data, verify_constraints
from .satake_g import grassmannian_direct, grassmannian_monodromy

__all__ = [
    "BraidWord", "ExceptionalBasis", "IntegratorConfig", "MatchResult", "MonodromyData", "QDEError",
    "SmallQHPoint", "beilinson_basis", "braid_act", "build_system_p", "canonical_coordinates",
    "dubrovin_morphism", "get_backend", "gram_matrix", "grassmannian_direct", "grassmannian_monodromy",
    "monodromy_data", "mutate", "orbit_match", "predicted_collection", "psi_matrix", "verify_constraints",
    "__version__",
]

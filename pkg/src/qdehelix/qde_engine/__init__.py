"""Solutions of the joint system and extraction of the monodromy data."""

from .formal import FormalSolution, evaluate_formal, formal_residual, formal_solution, generic_formal_solution
from .integrate import IntegratorConfig, integrate, propagate
from .levelt import (LeveltSolution, check_levelt, evaluate_levelt, joint_residuals, levelt_factors, orthogonality_residual,
                     topological_solution)
from .monodromy import (MonodromyData, chamber_constancy_check, continuation_monodromy, monodromy_data,
                        monodromy_m0, solve_monodromy, unitriangularity_defect, verify_constraints)
from .stokes import central_connection, stokes_fundamental, stokes_matrix, stokes_solutions

__all__ = [
    "FormalSolution", "IntegratorConfig", "LeveltSolution", "MonodromyData",
    "central_connection", "chamber_constancy_check", "check_levelt", "continuation_monodromy",
    "evaluate_formal", "evaluate_levelt", "formal_residual", "formal_solution", "generic_formal_solution",
    "integrate", "joint_residuals", "levelt_factors", "monodromy_data", "monodromy_m0", "orthogonality_residual", "propagate",
    "solve_monodromy", "stokes_fundamental", "stokes_matrix", "stokes_solutions", "topological_solution",
    "unitriangularity_defect", "verify_constraints",
]

"""Hybrid finite-difference solver for singularly perturbed parabolic
convection-diffusion problems with an interior discontinuity."""

from .analysis import (ConvergenceReport, MMatrixReport, check_m_matrix, convergence_study,
                       double_mesh_error, monotonicity_preconditions, order_of_convergence,
                       upwind_reference_solve)
from .mesh import SchemeKind, ShishkinMesh, build_mesh, scheme_kind
from .problem import PiecewiseField, Problem, Side, builtin_example, eval_field, validate_problem
from .scheme import SolutionGrid, TridiagonalSystem, assemble_step, solve, thomas_solve

__all__ = [
    "ConvergenceReport", "MMatrixReport", "PiecewiseField", "Problem", "SchemeKind", "ShishkinMesh",
    "Side", "SolutionGrid", "TridiagonalSystem", "assemble_step", "build_mesh", "builtin_example",
    "check_m_matrix", "convergence_study", "double_mesh_error", "eval_field", "monotonicity_preconditions",
    "order_of_convergence", "scheme_kind", "solve", "thomas_solve", "upwind_reference_solve",
    "validate_problem",
]

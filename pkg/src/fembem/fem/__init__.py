"""Lagrange finite elements for the interior heterogeneous Dirichlet problem."""

from .assembly import (FemSolution, FemSystem, assemble, element_matrices, factorize,
                       solve_dirichlet, solve_free)
from .evaluate import error_norms, eval_field_on_grid, evaluation_matrix, locate, trace_at_points

__all__ = ["FemSolution", "FemSystem", "assemble", "element_matrices", "factorize",
           "solve_dirichlet", "solve_free", "error_norms", "eval_field_on_grid",
           "evaluation_matrix", "locate", "trace_at_points"]

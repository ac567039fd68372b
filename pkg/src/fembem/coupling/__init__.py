"""Schur-complement coupling of the interior FEM and exterior BEM solvers."""

from .gmres import GmresResult, gmres
from .problem import (CoupledProblem, DirectInterfaceSolver, InterfaceState, K_tilde_matrix,
                      apply_K_hat, apply_K_tilde, apply_schur, build_problem, direct_solver,
                      exterior_field, incident_data, interface_rhs, overlap_consistency,
                      reconstruct, sample_overlap, schur_matrix, solve_interface,
                      state_far_field)

__all__ = [
    "GmresResult", "gmres", "CoupledProblem", "DirectInterfaceSolver", "InterfaceState",
    "K_tilde_matrix", "apply_K_hat", "apply_K_tilde", "apply_schur", "build_problem",
    "direct_solver", "exterior_field", "incident_data", "interface_rhs",
    "overlap_consistency", "reconstruct", "sample_overlap", "schur_matrix",
    "solve_interface", "state_far_field",
]

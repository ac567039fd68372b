"""Nystrom boundary-integral solver for the exterior Helmholtz problem."""

from .kernels import split_from_geometry, split_kernels
from .nystrom import BemSystem, NystromGrid, assemble_bem, nystrom_matrix, solve_density
from .potentials import (check_exterior, eval_potentials, far_field, potential_matrix,
                         unit_directions)
from .quadrature import (grid_nodes, log_weight_matrix, log_weight_row, trapezoid_weight,
                         trig_interpolate)

__all__ = [
    "BemSystem", "NystromGrid", "assemble_bem", "check_exterior", "eval_potentials",
    "far_field", "grid_nodes", "log_weight_matrix", "log_weight_row", "nystrom_matrix",
    "potential_matrix", "solve_density", "split_from_geometry", "split_kernels",
    "trapezoid_weight", "trig_interpolate", "unit_directions",
]

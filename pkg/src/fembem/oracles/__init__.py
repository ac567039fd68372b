"""Reference solutions and brute-force checks independent of the solvers."""

from .convergence import (ConvergenceRow, ConvergenceTable, convergence_study, fitted_order,
                          observed_orders, series_truth)
from .quadrature import brute_quadrature
from .series import (SeriesError, SeriesSolution, mie_far_field, mie_near_field, mie_solution,
                     optical_theorem_sides)

__all__ = [
    "ConvergenceRow", "ConvergenceTable", "convergence_study", "fitted_order",
    "observed_orders", "series_truth", "brute_quadrature", "SeriesError", "SeriesSolution",
    "mie_far_field", "mie_near_field", "mie_solution", "optical_theorem_sides",
]

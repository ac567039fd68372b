"""Nystrom discretisation of the combined-field operator 1/2 I + K_k - i k V_k.

Densities live at the 2N grid nodes.  The single layer acts on the
parameterised density (|x'| absorbed), the double layer carries mu(t) in its
kernel, exactly as in the discrete far-field formula used downstream.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from ..errors import SolverError
from .kernels import split_from_geometry
from .quadrature import grid_nodes, log_weight_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NystromGrid:
    curve: object
    N: int

    @cached_property
    def t(self):
        return grid_nodes(self.N)

    @cached_property
    def x(self):
        return self.curve.position(self.t)

    @cached_property
    def dx(self):
        return self.curve.tangent(self.t)

    @cached_property
    def ddx(self):
        return self.curve.second(self.t)

    @cached_property
    def mu(self):
        return np.stack([self.dx[:, 1], -self.dx[:, 0]], axis=1)

    @property
    def size(self):
        return 2 * self.N

    @property
    def spacing(self):
        """Largest distance between neighbouring nodes, measured along the curve."""
        return np.pi / self.N * float(np.linalg.norm(self.dx, axis=1).max())


@dataclass(frozen=True)
class BemSystem:
    grid: NystromGrid
    k: float
    matrix: np.ndarray
    lu: tuple
    cond: float

    def solve(self, g):
        return solve_density(self, g)


def nystrom_matrix(grid: NystromGrid, k):
    """Dense 2N x 2N matrix of 1/2 I + K_k^N - i k V_k^N."""
    N = grid.N
    n = 2 * N
    t = grid.t
    delta = t[:, None] - t[None, :]
    diag = np.eye(n, dtype=bool)
    A, B, C, D = split_from_geometry(
        k, delta, grid.x[:, None, :], grid.x[None, :, :], grid.dx[None, :, :],
        grid.ddx[None, :, :], jacobian=False, diag=diag)
    R = log_weight_matrix(N)
    h = np.pi / N
    mat = R * (C - 1j * k * A) + h * (D - 1j * k * B)
    mat[diag] += 0.5
    return mat


def assemble_bem(grid: NystromGrid, k) -> BemSystem:
    if not k > 0:
        raise ValueError("wavenumber must be positive")
    mat = nystrom_matrix(grid, k)
    cond = float(np.linalg.cond(mat))
    if not np.isfinite(cond) or cond > 1e12:
        raise SolverError(f"Nystrom matrix is numerically singular (cond={cond:.3e})")
    logger.debug("Nystrom matrix N=%d k=%g cond=%.3e", grid.N, k, cond)
    return BemSystem(grid=grid, k=float(k), matrix=mat, lu=lu_factor(mat), cond=cond)


def solve_density(system: BemSystem, g):
    """phi = (1/2 I + K - i k V)^{-1} g at the grid nodes (vector or matrix)."""
    g = np.asarray(g, dtype=complex)
    if g.shape[0] != system.grid.size:
        raise ValueError(f"expected {system.grid.size} nodal values, got {g.shape[0]}")
    return lu_solve(system.lu, g)

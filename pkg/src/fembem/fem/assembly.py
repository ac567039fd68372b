"""Assembly and factorisation of the interior Dirichlet problem.

Bilinear form: b(u, v) = int grad u . grad v - k^2 int n^2 u v over the FEM
polygon.  Free-node block ``A`` and Dirichlet coupling ``D`` are real, so
complex right-hand sides are solved as two real systems.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..errors import AssemblyError, ResonanceError
from .reference import reference_matrices

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-12
DIAG_PIVOT_THRESH = 0.1


@dataclass(frozen=True)
class FemSystem:
    mesh: object
    k: float
    field: object
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix  # n^2-weighted mass over all nodes
    A: sp.csc_matrix
    D: sp.csr_matrix
    lu: Optional[object] = None

    @property
    def full(self):
        return (self.stiffness - self.k**2 * self.mass).tocsr()


@dataclass(frozen=True)
class FemSolution:
    """Nodal values over every mesh node (free and Dirichlet)."""

    mesh: object
    values: np.ndarray


def element_geometry(mesh):
    v = mesh.vertices[mesh.triangles]
    J = np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]], axis=2)  # columns
    det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    return v[:, 0], J, det


def element_matrices(mesh, field=None):
    """Per-element stiffness and n^2-weighted mass, shape (nt, nloc, nloc)."""
    d = mesh.degree
    pts, w, phi, S = reference_matrices(d)
    origin, J, det = element_geometry(mesh)
    h2 = np.max(np.sum((mesh.vertices[mesh.triangles]
                        - np.roll(mesh.vertices[mesh.triangles], -1, axis=1)) ** 2, axis=2), axis=1)
    bad = np.flatnonzero(np.abs(det) < 2e-14 * h2)
    if len(bad):
        raise AssemblyError(f"degenerate triangle(s) {bad[:10].tolist()}")
    Jinv = np.linalg.inv(J)
    C = np.einsum("tac,tbc->tab", Jinv, Jinv)  # J^-1 J^-T
    area = np.abs(det)
    K = area[:, None, None] * np.einsum("tab,abij->tij", C, S)
    K = 0.5 * (K + np.swapaxes(K, 1, 2))
    xq = origin[:, None, :] + np.einsum("tij,qj->tqi", J, pts)
    n2 = np.ones(xq.shape[:2]) if field is None else field(xq)
    wq = area[:, None] * w[None, :] * n2
    M = np.einsum("tq,qi,qj->tij", wq, phi, phi)
    return K, M


def _scatter(mesh, local):
    el = mesh.elements
    nloc = el.shape[1]
    rows = np.repeat(el, nloc, axis=1).ravel()
    cols = np.tile(el, (1, nloc)).ravel()
    n = mesh.n_nodes
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def assemble(mesh, k, field=None) -> FemSystem:
    """Assemble ``A`` (free x free) and ``D`` (free x Dirichlet)."""
    if k < 0:
        raise AssemblyError("wavenumber must be non-negative")
    K, M = element_matrices(mesh, field)
    S = _scatter(mesh, K)
    Mw = _scatter(mesh, M)
    full = (S - k**2 * Mw).tocsr()
    A = full[mesh.free][:, mesh.free]
    A = (0.5 * (A + A.T)).tocsc()
    D = (-full[mesh.free][:, mesh.dirichlet]).tocsr()
    logger.debug("assembled FEM system: L=%d, M=%d, nnz(A)=%d", A.shape[0], D.shape[1], A.nnz)
    return FemSystem(mesh=mesh, k=float(k), field=field, stiffness=S, mass=Mw, A=A, D=D)


@dataclass(frozen=True)
class SparseFactor:
    """Sparse LU of the free-node matrix with one step of iterative refinement."""

    matrix: sp.csc_matrix
    lu: object

    def solve(self, rhs):
        x = self.lu.solve(rhs)
        return x + self.lu.solve(rhs - self.matrix @ x)


def factorize_matrix(A, scale=None):
    """Sparse LU of a real symmetric (possibly indefinite) matrix with singularity check.

    A pivot below 1e-12 times ``scale`` (default: the largest diagonal entry
    of ``A``) marks the matrix as singular.

    SuperLU runs in symmetric mode (fill-reducing ordering of A + A^T with
    diagonal pivots preferred), which keeps the fill of the Lagrange
    matrices close to that of a symmetric factorisation.
    """
    A = sp.csc_matrix(A)
    if A.shape[0] == 0:
        return None
    try:
        lu = splu(A, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=DIAG_PIVOT_THRESH,
                  options={"SymmetricMode": True})
    except RuntimeError as exc:
        raise ResonanceError(
            "resonant configuration: the interior Dirichlet matrix is singular; "
            "change the FEM polygon or the wavenumber") from exc
    piv = np.abs(lu.U.diagonal())
    if scale is None:
        scale = np.abs(A.diagonal()).max() if A.nnz else 0.0
        if scale == 0.0:
            scale = abs(A).max()
    if piv.min() < PIVOT_TOL * scale:
        raise ResonanceError(
            f"resonant configuration: pivot {piv.min():.3e} below {PIVOT_TOL:g} x {scale:.3e}; "
            "change the FEM polygon or the wavenumber")
    return SparseFactor(A, lu)


def factorize(system: FemSystem) -> FemSystem:
    """Factorise ``A``; pivots are measured against the stiffness and mass diagonals,
    so that a cancellation between them at a resonance is detected."""
    free = system.mesh.free
    if len(free):
        s = np.abs(system.stiffness.diagonal()[free]).max()
        m = system.k**2 * np.abs(system.mass.diagonal()[free]).max()
        scale = max(s, m)
    else:
        scale = None
    return replace(system, lu=factorize_matrix(system.A, scale))


def solve_real(lu, rhs):
    """Solve with a real factorisation against a complex right-hand side (vector or matrix)."""
    rhs = np.asarray(rhs)
    if lu is None:
        return np.zeros_like(rhs, dtype=complex)
    if not np.iscomplexobj(rhs):
        return lu.solve(np.ascontiguousarray(rhs, dtype=float)).astype(complex)
    vec = rhs.ndim == 1
    r = rhs[:, None] if vec else rhs
    both = np.concatenate([r.real, r.imag], axis=1)
    sol = lu.solve(np.ascontiguousarray(both))
    n = r.shape[1]
    out = sol[:, :n] + 1j * sol[:, n:]
    return out[:, 0] if vec else out


def _require_lu(system):
    if system.lu is None and system.A.shape[0] > 0:
        raise AssemblyError("system must be factorized before solving")


def solve_free(system: FemSystem, rhs):
    _require_lu(system)
    return solve_real(system.lu, rhs)


def solve_dirichlet(system: FemSystem, f_sigma) -> FemSolution:
    """Interior total field with Dirichlet data ``f_sigma`` on the boundary nodes."""
    _require_lu(system)
    mesh = system.mesh
    f = np.asarray(f_sigma, dtype=complex)
    if f.shape != (mesh.n_dirichlet,):
        raise ValueError(f"expected {mesh.n_dirichlet} Dirichlet values, got {f.shape}")
    u = np.zeros(mesh.n_nodes, dtype=complex)
    u[mesh.dirichlet] = f
    if mesh.n_free:
        u[mesh.free] = solve_real(system.lu, system.D @ f)
    return FemSolution(mesh, u)

"""FEM-BEM interface system on the overlap of the two artificial boundaries.

Unknowns are the total field on the Dirichlet nodes of the FEM polygon
(``f_hat``, length M) and the scattered-field trace on the BEM grid
(``f_tilde``, length 2N).  With

    K_tilde = T A^{-1} D    (FEM solve followed by evaluation on the curve)
    K_hat   = P B^{-1}      (BEM solve followed by the potential on the polygon)

the system reduces to the Schur complement (I - K_tilde K_hat) f_tilde =
-u_inc(curve) + K_tilde u_inc(polygon), and then f_hat = u_inc + K_hat f_tilde.

Unique solvability of the interface system is assumed rather than checked.  The
parts that can be checked are: the nesting of heterogeneity, curve and polygon
(validated when the problem is built), and k^2 not being a Dirichlet eigenvalue
of the polygon (detected by the factorisation as a ResonanceError).
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from ..bem import NystromGrid, assemble_bem, eval_potentials, far_field, potential_matrix
from ..bem.potentials import check_exterior
from ..errors import ConfigurationError, SolverError
from ..fem import assemble, evaluation_matrix, factorize, solve_dirichlet
from ..fem.assembly import solve_real
from ..geometry.mesh import points_in_polygon
from ..geometry.nesting import validate_nesting
from .gmres import gmres

logger = logging.getLogger(__name__)

METHODS = ("gmres", "direct")


@dataclass(frozen=True)
class CoupledProblem:
    """Assembled and factorised coupled problem; immutable after :func:`build_problem`."""

    fem: object  # factorised FemSystem
    bem: object  # BemSystem
    sigma_nodes: np.ndarray  # (M, 2)
    gamma_nodes: np.ndarray  # (2N, 2)
    wave: object
    T_free: object  # sparse (2N, L)
    T_dir: object  # sparse (2N, M)
    K_hat: np.ndarray  # dense (M, 2N)
    nesting: object = None
    timings: dict = field(default_factory=dict)

    @property
    def mesh(self):
        return self.fem.mesh

    @property
    def grid(self):
        return self.bem.grid

    @property
    def k(self):
        return self.bem.k

    @property
    def M(self):
        return len(self.sigma_nodes)

    @property
    def size(self):
        return len(self.gamma_nodes)

    def summary(self):
        mesh = self.mesh
        return {"L": int(mesh.n_free), "M": int(self.M), "N": int(self.grid.N),
                "degree": int(mesh.degree), "level": int(mesh.level), "k": float(self.k)}


@dataclass
class InterfaceState:
    f_hat: np.ndarray
    f_tilde: np.ndarray
    method: str
    iterations: int
    residuals: list
    residual: float  # final relative residual of the Schur system
    timings: dict = field(default_factory=dict)

    def diagnostics(self):
        return {"method": self.method, "iterations": int(self.iterations),
                "residual": float(self.residual), "timings": dict(self.timings)}


def build_problem(mesh, gamma, N, wave, medium=None, validate=True) -> CoupledProblem:
    """Assemble FEM and BEM parts and precompute the two transfer maps.

    Parameters
    ----------
    mesh : TriMesh
        FEM mesh of the polygon; its boundary is the Dirichlet interface.
    gamma : SmoothCurve
        BEM curve, nested between the heterogeneity and the polygon.
    N : int
        Half the number of BEM grid nodes.
    wave : PlaneWave
        Incident field; its wavenumber fixes k.
    medium : RefractiveField, optional
        Refractive index (homogeneous when omitted).
    """
    t0 = time.perf_counter()
    nesting = validate_nesting(gamma, mesh, medium) if validate else None
    k = wave.k
    timings = {}
    fem = factorize(assemble(mesh, k, medium))
    t1 = time.perf_counter()
    timings["fem_assembly"] = t1 - t0
    grid = NystromGrid(gamma, int(N))
    bem = assemble_bem(grid, k)
    t2 = time.perf_counter()
    timings["bem_assembly"] = t2 - t1

    sigma_nodes = mesh.nodes[mesh.dirichlet]
    gamma_nodes = grid.x
    T = evaluation_matrix(mesh, gamma_nodes).tocsc()
    T_free = T[:, mesh.free].tocsr()
    T_dir = T[:, mesh.dirichlet].tocsr()
    check_exterior(grid, sigma_nodes)
    P = potential_matrix(grid, k, sigma_nodes)
    # K_hat = P B^{-1}  <=>  K_hat^T = B^{-T} P^T
    K_hat = lu_solve(bem.lu, P.T, trans=1).T
    timings["transfer_maps"] = time.perf_counter() - t2
    logger.info("coupled problem: L=%d M=%d 2N=%d", mesh.n_free, len(sigma_nodes), grid.size)
    return CoupledProblem(fem=fem, bem=bem, sigma_nodes=sigma_nodes, gamma_nodes=gamma_nodes,
                          wave=wave, T_free=T_free, T_dir=T_dir, K_hat=K_hat,
                          nesting=nesting, timings=timings)


def apply_K_tilde(problem: CoupledProblem, f_sigma):
    """Trace on the curve nodes of the FEM solution with Dirichlet data ``f_sigma``."""
    f = np.asarray(f_sigma, dtype=complex)
    fem = problem.fem
    u_free = solve_real(fem.lu, fem.D @ f)
    return problem.T_free @ u_free + problem.T_dir @ f


def apply_K_hat(problem: CoupledProblem, g):
    return problem.K_hat @ np.asarray(g, dtype=complex)


def K_tilde_matrix(problem: CoupledProblem):
    """Dense (2N, M) matrix of K_tilde from 2N solves with the symmetric FEM matrix."""
    fem = problem.fem
    W = solve_real(fem.lu, problem.T_free.T.toarray())  # A^{-1} T_free^T, shape (L, 2N)
    return np.asarray((fem.D.T @ W).T) + problem.T_dir.toarray()


def apply_schur(problem: CoupledProblem, f_tilde):
    """(I - K_tilde K_hat) f_tilde."""
    f = np.asarray(f_tilde, dtype=complex)
    return f - apply_K_tilde(problem, apply_K_hat(problem, f))


def schur_matrix(problem: CoupledProblem):
    return np.eye(problem.size, dtype=complex) - K_tilde_matrix(problem) @ problem.K_hat


def incident_data(problem: CoupledProblem):
    """(u_inc on the polygon nodes, u_inc on the curve nodes)."""
    return problem.wave(problem.sigma_nodes), problem.wave(problem.gamma_nodes)


def interface_rhs(problem: CoupledProblem):
    u_sigma, u_gamma = incident_data(problem)
    return -u_gamma + apply_K_tilde(problem, u_sigma)


def solve_interface(problem: CoupledProblem, method="gmres", tol=1e-8,
                    log=None) -> InterfaceState:
    """Solve the Schur system and recover the polygon values.

    ``log`` (optional list) receives ``(iteration, relative residual)`` pairs.
    """
    if method not in METHODS:
        raise ConfigurationError(f"unknown solver {method!r}; choose from {METHODS}")
    if not tol > 0:
        raise ConfigurationError("solver tolerance must be positive")
    t0 = time.perf_counter()
    rhs = interface_rhs(problem)
    u_sigma, _ = incident_data(problem)
    timings = {}
    if method == "gmres":
        def record(it, res):
            logger.debug("gmres iter %d residual %.3e", it, res)
            if log is not None:
                log.append((it, res))

        res = gmres(lambda v: apply_schur(problem, v), rhs, tol=tol,
                    max_iter=10 * problem.size, callback=record)
        f_tilde, iterations, history = res.x, res.iterations, res.residuals
    else:
        A = schur_matrix(problem)
        timings["schur_matrix"] = time.perf_counter() - t0
        f_tilde = _dense_solve(A, rhs)
        iterations, history = 0, []
    bnorm = np.linalg.norm(rhs)
    residual = (float(np.linalg.norm(rhs - apply_schur(problem, f_tilde)) / bnorm)
                if bnorm > 0 else 0.0)
    f_hat = u_sigma + apply_K_hat(problem, f_tilde)
    timings["interface_solve"] = time.perf_counter() - t0
    return InterfaceState(f_hat=f_hat, f_tilde=f_tilde, method=method, iterations=iterations,
                          residuals=list(history), residual=residual, timings=timings)


def _dense_solve(A, rhs):
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e14:
        raise SolverError(f"interface matrix is numerically singular (cond={cond:.3e})")
    return lu_solve(lu_factor(A), rhs)


@dataclass(frozen=True)
class DirectInterfaceSolver:
    """Factorised dense Schur complement, reusable for many incident waves."""

    problem: CoupledProblem
    K_tilde: np.ndarray
    lu: tuple

    def solve(self, waves):
        """States for a list of incident waves sharing the problem's wavenumber."""
        P = self.problem
        U_sigma = np.stack([w(P.sigma_nodes) for w in waves], axis=1)
        U_gamma = np.stack([w(P.gamma_nodes) for w in waves], axis=1)
        rhs = -U_gamma + self.K_tilde @ U_sigma
        F_tilde = lu_solve(self.lu, rhs)
        F_hat = U_sigma + P.K_hat @ F_tilde
        states = []
        for j in range(len(waves)):
            b = rhs[:, j]
            nb = np.linalg.norm(b)
            r = (float(np.linalg.norm(b - apply_schur(P, F_tilde[:, j])) / nb)
                 if nb > 0 else 0.0)
            states.append(InterfaceState(f_hat=F_hat[:, j], f_tilde=F_tilde[:, j],
                                         method="direct", iterations=0, residuals=[],
                                         residual=r))
        return states


def direct_solver(problem: CoupledProblem) -> DirectInterfaceSolver:
    Kt = K_tilde_matrix(problem)
    A = np.eye(problem.size, dtype=complex) - Kt @ problem.K_hat
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e14:
        raise SolverError(f"interface matrix is numerically singular (cond={cond:.3e})")
    return DirectInterfaceSolver(problem=problem, K_tilde=Kt, lu=lu_factor(A))


def reconstruct(problem: CoupledProblem, state: InterfaceState):
    """Interior total field (FemSolution) and the exterior density."""
    u_h = solve_dirichlet(problem.fem, state.f_hat)
    phi = problem.bem.solve(state.f_tilde)
    return u_h, phi


def exterior_field(problem: CoupledProblem, phi, points, total=True, check=True):
    """omega_N (+ u_inc when ``total``) at points exterior to the curve."""
    w = eval_potentials(problem.grid, problem.k, phi, points, check=check)
    return w + problem.wave(points) if total else w


def state_far_field(problem: CoupledProblem, phi, directions):
    return far_field(problem.grid, problem.k, phi, directions)


def sample_overlap(problem: CoupledProblem, count, seed=0, margin=0.0):
    """Uniform random points of the polygon outside the curve, at least ``margin`` from it."""
    rng = np.random.default_rng(seed)
    poly = problem.mesh.sigma_polygon
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    curve = problem.grid.curve
    fine = curve.samples(4096)
    out = []
    need = int(count)
    for _ in range(1000):
        if need <= 0:
            break
        cand = rng.uniform(lo, hi, size=(max(4 * need, 64), 2))
        ok = points_in_polygon(cand, poly) & ~curve.contains(cand)
        cand = cand[ok]
        if margin > 0 and len(cand):
            d = np.linalg.norm(cand[:, None, :] - fine[None, :, :], axis=-1).min(axis=1)
            cand = cand[d >= margin]
        out.append(cand[:need])
        need -= len(out[-1])
    if need > 0:
        raise ConfigurationError("the overlap region is empty or too thin to sample")
    return np.concatenate(out)


def overlap_consistency(problem: CoupledProblem, state: InterfaceState, sample_count=200,
                        seed=0, margin=0.0, fields=None):
    """max |u_h(p) - (omega_N(p) + u_inc(p))| over random overlap points."""
    pts = sample_overlap(problem, sample_count, seed=seed, margin=margin)
    u_h, phi = fields if fields is not None else reconstruct(problem, state)
    inner = evaluation_matrix(problem.mesh, pts) @ u_h.values
    outer = exterior_field(problem, phi, pts, total=True, check=False)
    return float(np.abs(inner - outer).max())

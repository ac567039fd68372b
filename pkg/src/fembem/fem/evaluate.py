"""Point location and evaluation of finite element functions."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree

from ..errors import LocationError
from .assembly import FemSolution, element_geometry
from .reference import lagrange_element, triangle_quadrature

BARY_TOL = 1e-10


def _barycentric(mesh, tri_idx, pts):
    v = mesh.vertices[mesh.triangles[tri_idx]]
    d1, d2 = v[..., 1, :] - v[..., 0, :], v[..., 2, :] - v[..., 0, :]
    r = pts - v[..., 0, :]
    det = d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]
    xi = (r[..., 0] * d2[..., 1] - r[..., 1] * d2[..., 0]) / det
    eta = (d1[..., 0] * r[..., 1] - d1[..., 1] * r[..., 0]) / det
    return xi, eta


def locate(mesh, points, candidates=12, strict=True):
    """Containing triangle and reference coordinates for each point.

    Nearest-centroid candidates first, brute force over all triangles as the
    fallback.  Points not found get triangle index -1, or raise if ``strict``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(pts)
    tri = np.full(n, -1, dtype=int)
    ref = np.zeros((n, 2))
    if n == 0:
        return tri, ref
    cent = mesh.vertices[mesh.triangles].mean(axis=1)
    kq = min(candidates, len(cent))
    _, cand = cKDTree(cent).query(pts, k=kq)
    cand = cand.reshape(n, kq)
    xi, eta = _barycentric(mesh, cand, pts[:, None, :])
    ok = (xi >= -BARY_TOL) & (eta >= -BARY_TOL) & (1 - xi - eta >= -BARY_TOL)
    hit = ok.any(axis=1)
    first = np.argmax(ok, axis=1)
    rows = np.flatnonzero(hit)
    tri[rows] = cand[rows, first[rows]]
    ref[rows, 0] = xi[rows, first[rows]]
    ref[rows, 1] = eta[rows, first[rows]]
    all_tri = np.arange(len(mesh.triangles))
    for i in np.flatnonzero(~hit):
        x, e = _barycentric(mesh, all_tri, pts[i])
        good = np.flatnonzero((x >= -BARY_TOL) & (e >= -BARY_TOL) & (1 - x - e >= -BARY_TOL))
        if len(good):
            tri[i] = good[0]
            ref[i] = x[good[0]], e[good[0]]
        elif strict:
            raise LocationError(f"point {pts[i].tolist()} lies outside the mesh")
    return tri, ref


def evaluation_matrix(mesh, points):
    """Sparse matrix E with (E @ values)[p] = u_h(points[p])."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    tri, ref = locate(mesh, pts)
    phi = lagrange_element(mesh.degree).values(ref)
    nloc = phi.shape[1]
    rows = np.repeat(np.arange(len(pts)), nloc)
    cols = mesh.elements[tri].ravel()
    return sp.csr_matrix((phi.ravel(), (rows, cols)), shape=(len(pts), mesh.n_nodes))


def trace_at_points(solution: FemSolution, points):
    return evaluation_matrix(solution.mesh, points) @ solution.values


def eval_field_on_grid(solution: FemSolution, xs, ys):
    """Complex raster of shape (len(ys), len(xs)); NaN outside the FEM polygon."""
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    out = np.full(len(pts), np.nan + 1j * np.nan)
    if len(pts) == 0:
        return out.reshape(X.shape)
    mesh = solution.mesh
    tri, ref = locate(mesh, pts, strict=False)
    ok = tri >= 0
    if ok.any():
        phi = lagrange_element(mesh.degree).values(ref[ok])
        out[ok] = np.einsum("pi,pi->p", phi, solution.values[mesh.elements[tri[ok]]])
    return out.reshape(X.shape)


def error_norms(solution: FemSolution, exact, exact_grad, order=None):
    """L2 error, H1-seminorm error and H1 error against an exact field.

    ``exact(points)`` returns values, ``exact_grad(points)`` gradients (..., 2).
    """
    mesh = solution.mesh
    d = mesh.degree
    el = lagrange_element(d)
    pts, w = triangle_quadrature(order or d + 3)
    phi = el.values(pts)
    dphi = el.gradients(pts)
    origin, J, det = element_geometry(mesh)
    Jinv = np.linalg.inv(J)
    xq = origin[:, None, :] + np.einsum("tij,qj->tqi", J, pts)
    coef = solution.values[mesh.elements]
    uh = np.einsum("qi,ti->tq", phi, coef)
    gref = np.einsum("qic,ti->tqc", dphi, coef)
    guh = np.einsum("tqc,tca->tqa", gref, Jinv)
    wq = np.abs(det)[:, None] * w[None, :]
    eu = exact(xq) - uh
    eg = exact_grad(xq) - guh
    l2 = np.sqrt(np.sum(wq * np.abs(eu) ** 2))
    semi = np.sqrt(np.sum(wq * np.sum(np.abs(eg) ** 2, axis=-1)))
    return l2, semi, float(np.hypot(l2, semi))

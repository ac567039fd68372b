"""Reference-triangle Lagrange bases and quadrature.

Reference triangle: (0,0), (1,0), (0,1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from ..geometry.mesh import reference_nodes


@lru_cache(maxsize=None)
def triangle_quadrature(n):
    """Collapsed Gauss rule with n*n points, exact for polynomials of degree 2n-1."""
    xj, wj = roots_jacobi(n, 1.0, 0.0)
    xl, wl = roots_legendre(n)
    u, wu = 0.5 * (1 + xj), wj / 4.0
    v, wv = 0.5 * (1 + xl), wl / 2.0
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv)
    pts = np.stack([U.ravel(), ((1 - U) * V).ravel()], axis=1)
    return pts, W.ravel()


def _exponents(d):
    return [(a, b) for s in range(d + 1) for a in range(s, -1, -1) for b in [s - a]]


def _monomials(pts, d):
    x, y = pts[:, 0], pts[:, 1]
    return np.stack([x**a * y**b for a, b in _exponents(d)], axis=1)


def _monomial_grads(pts, d):
    x, y = pts[:, 0], pts[:, 1]
    gx, gy = [], []
    for a, b in _exponents(d):
        gx.append(a * x ** max(a - 1, 0) * y**b if a else np.zeros_like(x))
        gy.append(b * x**a * y ** max(b - 1, 0) if b else np.zeros_like(x))
    return np.stack([np.stack(gx, axis=1), np.stack(gy, axis=1)], axis=-1)


@dataclass(frozen=True)
class LagrangeElement:
    degree: int
    nodes: np.ndarray
    coeffs: np.ndarray  # monomial -> nodal basis

    @property
    def n_local(self):
        return len(self.nodes)

    def values(self, pts):
        """Basis values, shape (npts, nloc)."""
        return _monomials(np.atleast_2d(pts), self.degree) @ self.coeffs

    def gradients(self, pts):
        """Reference gradients, shape (npts, nloc, 2)."""
        g = _monomial_grads(np.atleast_2d(pts), self.degree)
        return np.einsum("pmc,mi->pic", g, self.coeffs)


@lru_cache(maxsize=None)
def lagrange_element(d) -> LagrangeElement:
    nodes = reference_nodes(d)
    vander = _monomials(nodes, d)
    return LagrangeElement(d, nodes, np.linalg.inv(vander))


@lru_cache(maxsize=None)
def reference_matrices(d):
    """Quadrature data plus the four reference stiffness blocks S[a][b]."""
    el = lagrange_element(d)
    pts, w = triangle_quadrature(d + 1)
    phi = el.values(pts)
    dphi = el.gradients(pts)
    S = np.einsum("q,qia,qjb->abij", w, dphi, dphi)
    return pts, w, phi, S

"""High-resolution reference quadrature on [0, 2 pi].

Independent of the trigonometric interpolation behind the Nystrom weights:
the logarithmic case folds the period onto [0, pi], splits
log sin^2(u/2) = 2 log u + 2 log(sin(u/2)/u), integrates the constant part
of the log u singularity in closed form and uses composite Gauss-Legendre
panels for everything else.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def _panels(fn, a, b, n_points, order=8):
    """Composite Gauss-Legendre with about ``n_points`` nodes in total."""
    panels = max(1, n_points // order)
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    total = 0.0 + 0.0j
    chunk = 1 << 20
    for s in range(0, len(nodes), chunk):
        total += np.sum(weights[s:s + chunk] * fn(nodes[s:s + chunk]))
    return total


def brute_quadrature(integrand, n_points, log_singular=False, s=0.0):
    """Reference value of a periodic integral over one period.

    Parameters
    ----------
    integrand : callable
        Vectorised function of t.  With ``log_singular`` it is the smooth
        factor g of ``g(t) log sin^2((s - t)/2)``.
    n_points : int
        Approximate number of quadrature nodes.
    log_singular : bool
        Whether the logarithmic factor is present.
    s : float
        Location of the singularity.
    """
    if not log_singular:
        t = TWO_PI * np.arange(n_points) / n_points
        return complex(TWO_PI / n_points * np.sum(integrand(t)))

    def G(u):
        return integrand(s + u) + integrand(s - u)

    G0 = G(np.zeros(1))[0]

    def smooth(u):
        return 2.0 * (G(u) - G0) * np.log(u) + 2.0 * G(u) * np.log(np.sinc(u / (2 * np.pi)) / 2)

    # int_0^pi 2 G0 log u du = 2 G0 (pi log pi - pi)
    exact = 2.0 * G0 * (np.pi * np.log(np.pi) - np.pi)
    return complex(exact + _panels(smooth, 0.0, np.pi, n_points))

"""Check that the heterogeneity, the BEM curve and the FEM polygon are nested."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from .mesh import distance_to_segments, points_in_polygon


@dataclass(frozen=True)
class NestingReport:
    gamma_to_sigma: float
    support_to_gamma: float  # inf for a homogeneous medium
    samples: int

    def as_dict(self):
        return {"gamma_to_sigma": self.gamma_to_sigma,
                "support_to_gamma": self.support_to_gamma}


def validate_nesting(gamma, mesh, hetero=None, samples=4096) -> NestingReport:
    """Verify closure(Omega_0) in Omega_1 and closure(Omega_1) in Omega_2.

    Returns the minimum sampled clearances; raises
    :class:`ConfigurationError` naming an offending point otherwise.
    """
    sigma = mesh.sigma_polygon
    g = gamma.samples(samples)
    inside = points_in_polygon(g, sigma)
    if not inside.all():
        bad = g[np.flatnonzero(~inside)[0]]
        raise ConfigurationError(f"curve point {bad.tolist()} is not inside the FEM polygon")
    a, b = sigma, np.roll(sigma, -1, axis=0)
    clear = distance_to_segments(g, a, b)
    if clear.min() <= 0.0:
        bad = g[int(np.argmin(clear))]
        raise ConfigurationError(f"curve touches the FEM boundary at {bad.tolist()}")

    support = np.inf
    if hetero is not None and not hetero.is_uniform:
        s = hetero.boundary_samples(samples)
        ins = points_in_polygon(s, g)
        if not ins.all():
            bad = s[np.flatnonzero(~ins)[0]]
            raise ConfigurationError(
                f"heterogeneity boundary point {bad.tolist()} lies outside the curve")
        dist = distance_to_segments(g, s, np.roll(s, -1, axis=0))
        support = float(dist.min())
        if support <= 0.0:
            raise ConfigurationError("the curve intersects the heterogeneity")
        # the curve itself must avoid the support
        hit = hetero.in_support(g)
        if hit.any():
            bad = g[np.flatnonzero(hit)[0]]
            raise ConfigurationError(f"curve point {bad.tolist()} lies in the heterogeneity")
    return NestingReport(gamma_to_sigma=float(clear.min()), support_to_gamma=support,
                         samples=samples)

"""Combined layer potential DL - i k SL and its far field from nodal densities."""

from __future__ import annotations

import logging
import warnings

import numpy as np
from scipy.special import hankel1

from ..errors import LocationError

logger = logging.getLogger(__name__)

CHUNK = 4096


LAYERS = ("combined", "single", "double")


def potential_matrix(grid, k, points, kind="combined"):
    """(P, 2N) matrix mapping nodal densities to layer potentials at points.

    ``kind`` selects DL_k^N - i k SL_k^N (default), SL_k^N or DL_k^N, all with
    the trapezoidal rule on the parameterised densities.
    """
    if kind not in LAYERS:
        raise ValueError(f"unknown layer {kind!r}; choose from {LAYERS}")
    z = np.atleast_2d(np.asarray(points, dtype=float))
    h = np.pi / grid.N
    out = np.empty((len(z), grid.size), dtype=complex)
    for a in range(0, len(z), CHUNK):
        diff = z[a:a + CHUNK, None, :] - grid.x[None, :, :]
        r = np.sqrt(np.sum(diff**2, axis=-1))
        kr = k * r
        if kind != "double":
            sl = 0.25j * hankel1(0, kr)
            if kind == "single":
                out[a:a + CHUNK] = h * sl
                continue
        proj = np.sum(diff * grid.mu[None, :, :], axis=-1) / r
        dl = 0.25j * k * hankel1(1, kr) * proj
        out[a:a + CHUNK] = h * (dl if kind == "double" else dl - 1j * k * sl)
    return out


def check_exterior(grid, points, warn=True):
    z = np.atleast_2d(np.asarray(points, dtype=float))
    if len(z) == 0:
        return
    inside = grid.curve.contains(z)
    if inside.any():
        bad = z[np.flatnonzero(inside)[0]]
        raise LocationError(f"point {bad.tolist()} is not exterior to the curve")
    if warn:
        near = _distance_to_nodes(grid, z) < 2 * grid.spacing
        if near.any():
            warnings.warn(f"{int(near.sum())} evaluation point(s) closer than two grid spacings "
                          "to the curve; the trapezoidal potential is inaccurate there",
                          stacklevel=3)


def _distance_to_nodes(grid, z):
    fine = grid.curve.samples(max(8 * grid.size, 1024))
    best = np.full(len(z), np.inf)
    for a in range(0, len(z), CHUNK):
        d = np.linalg.norm(z[a:a + CHUNK, None, :] - fine[None, :, :], axis=-1).min(axis=1)
        best[a:a + CHUNK] = d
    return best


def eval_potentials(grid, k, phi, points, check=True, kind="combined"):
    """Exterior field omega_N(z) = (DL_k^N - i k SL_k^N) phi at points outside the curve."""
    if check:
        check_exterior(grid, points)
    z = np.atleast_2d(np.asarray(points, dtype=float))
    if len(z) == 0:
        return np.zeros(0, dtype=complex)
    return potential_matrix(grid, k, z, kind) @ np.asarray(phi, dtype=complex)


def unit_directions(n):
    theta = 2 * np.pi * np.arange(n) / n
    return theta, np.stack([np.cos(theta), np.sin(theta)], axis=1)


def far_field(grid, k, phi, directions):
    """Far-field pattern F_N(z) of the combined potential.

    F_N(z) = sqrt(k / 8 pi) e^{-i pi/4} (pi/N)
             sum_j e^{-i k z.x(t_j)} [z . mu(t_j) + 1] phi_j
    """
    z = np.atleast_2d(np.asarray(directions, dtype=float))
    if np.any(np.abs(np.linalg.norm(z, axis=1) - 1.0) > 1e-12):
        raise ValueError("far-field directions must be unit vectors")
    phase = np.exp(-1j * k * (z @ grid.x.T))
    factor = z @ grid.mu.T + 1.0
    const = np.sqrt(k / (8 * np.pi)) * np.exp(-0.25j * np.pi) * np.pi / grid.N
    return const * ((phase * factor) @ np.asarray(phi, dtype=complex))

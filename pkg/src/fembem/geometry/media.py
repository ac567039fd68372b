"""Refractive-index fields and incident plane waves."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import GeometryError

LEVEL_SET_TOL = 1e-12


def chi_tilde(x):
    """Smooth cut-off: 1 for x <= 0, 0 for x >= 1, exp(1/(e - e^(1/x))) between."""
    x = np.asarray(x, dtype=float)
    out = np.where(x <= 0.0, 1.0, 0.0)
    mid = (x > 0.0) & (x < 1.0)
    if np.any(mid):
        xm = x[mid]
        with np.errstate(over="ignore", divide="ignore"):
            out[mid] = np.exp(1.0 / (np.e - np.exp(1.0 / xm)))
    return out


def chi(x):
    """Smooth step symmetric about 1/2: chi(x) + chi(1 - x) = 1."""
    x = np.asarray(x, dtype=float)
    return 0.5 * (chi_tilde(x) + 1.0 - chi_tilde(1.0 - x))


@dataclass(frozen=True)
class RefractiveField:
    """Squared refractive index n^2(x, y) with its heterogeneity support.

    Exactly one of ``polygon`` / ``indicator`` describes the support of
    ``1 - n``: a polygon (counter-clockwise vertices) the mesh can be aligned
    to, or a level-set function that is ``<= 0`` inside.  A field with neither
    is homogeneous.
    """

    n2: Callable[[np.ndarray, np.ndarray], np.ndarray]
    name: str = "uniform"
    polygon: Optional[np.ndarray] = None
    indicator: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    boundary: Optional[Callable[[int], np.ndarray]] = None
    radial_profile: Optional[Callable[[np.ndarray], np.ndarray]] = None
    params: dict = field(default_factory=dict)

    def __call__(self, points):
        p = np.asarray(points, dtype=float)
        return np.asarray(self.n2(p[..., 0], p[..., 1]), dtype=float) * np.ones(p.shape[:-1])

    @property
    def is_uniform(self):
        return self.polygon is None and self.indicator is None

    def in_support(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        if self.polygon is not None:
            from .mesh import points_in_polygon

            return points_in_polygon(p, self.polygon)
        if self.indicator is not None:
            return self.indicator(p[:, 0], p[:, 1]) <= LEVEL_SET_TOL
        return np.zeros(len(p), dtype=bool)

    def boundary_samples(self, n=2048):
        """Points on the boundary of the support (empty for a uniform medium)."""
        if self.polygon is not None:
            from .mesh import sample_polygon

            return sample_polygon(self.polygon, n)
        if self.boundary is not None:
            return self.boundary(n)
        return np.empty((0, 2))


def eval_refractive(field: RefractiveField, point):
    return field(point)


def _polar(x, y, cx=0.0, cy=0.0):
    return np.hypot(x - cx, y - cy), np.arctan2(y - cy, x - cx)


def uniform() -> RefractiveField:
    return RefractiveField(n2=lambda x, y: np.ones_like(np.asarray(x, dtype=float)))


def star_index(contrast=16.0) -> RefractiveField:
    """Smooth five-pointed star index n^2 = 1 + 16 chi(...) in polar coordinates."""

    def n2(x, y):
        r, th = _polar(x, y)
        return 1.0 + contrast * chi((r / (2.0 + 0.75 * np.sin(5 * th)) - 0.025) / 0.975)

    def indicator(x, y):
        r, th = _polar(x, y)
        return r / (2.0 + 0.75 * np.sin(5 * th)) - 1.0

    def boundary(n):
        th = 2 * np.pi * np.arange(n) / n
        r = 2.0 + 0.75 * np.sin(5 * th)
        return np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)

    return RefractiveField(n2=n2, name="star", indicator=indicator,
                           boundary=boundary, params={"contrast": contrast})


# Blocky stand-in for a character-shaped polygon: vertices on a 0.5
# lattice so structured meshes with h = 0.5 / 2^l are aligned to it.
PIKACHU_STAND_IN = np.array([
    (-2.0, -3.0), (2.0, -3.0), (2.0, 1.0), (2.5, 1.0), (2.5, 3.0), (1.5, 3.0),
    (1.5, 2.0), (-1.5, 2.0), (-1.5, 3.0), (-2.5, 3.0), (-2.5, 1.0), (-2.0, 1.0),
])


def pikachu_index(polygon=None) -> RefractiveField:
    """Discontinuous index 5 + 4 chi(...) inside a polygon, 1 outside.

    The default polygon is a labelled stand-in, not the original shape.
    """
    poly = PIKACHU_STAND_IN if polygon is None else np.asarray(polygon, dtype=float)
    from .mesh import points_in_polygon

    def n2(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r, th = _polar(x, y, -0.18, -0.6)
        inner = 5.0 + 4.0 * chi((r / (2.0 - 0.75 * np.cos(4 * th)) - 0.025) / 0.9)
        shape = np.broadcast(x, y).shape
        pts = np.stack(np.broadcast_arrays(x, y), axis=-1).reshape(-1, 2)
        inside = points_in_polygon(pts, poly).reshape(shape)
        return np.where(inside, inner, 1.0)

    return RefractiveField(n2=n2, name="pikachu-stand-in", polygon=poly,
                           params={"stand_in": polygon is None})


def _disk_level_set(radius, center):
    cx, cy = center

    def indicator(x, y):
        return np.hypot(x - cx, y - cy) - radius

    def boundary(n):
        th = 2 * np.pi * np.arange(n) / n
        return np.stack([cx + radius * np.cos(th), cy + radius * np.sin(th)], axis=-1)

    return indicator, boundary


def constant_disk(radius=1.0, n0=2.0, center=(0.0, 0.0)) -> RefractiveField:
    """Disk with constant index ``n0`` (sharp interface)."""
    if radius <= 0 or n0 <= 0:
        raise GeometryError("disk radius and index must be positive")
    indicator, boundary = _disk_level_set(radius, center)

    def profile(r):
        return np.where(np.asarray(r) < radius, n0**2, 1.0)

    def n2(x, y):
        return profile(np.hypot(x - center[0], y - center[1]))

    return RefractiveField(n2=n2, name="constant-disk", indicator=indicator,
                           boundary=boundary, radial_profile=profile,
                           params={"radius": radius, "n0": n0, "center": tuple(center)})


def smooth_disk(radius=1.0, n0=2.0, inner=0.25, center=(0.0, 0.0)) -> RefractiveField:
    """Radial index equal to ``n0`` for r <= inner and decaying smoothly to 1 at r = radius."""
    if not 0 <= inner < radius:
        raise GeometryError("smooth disk needs 0 <= inner < radius")
    indicator, boundary = _disk_level_set(radius, center)

    def profile(r):
        return 1.0 + (n0**2 - 1.0) * chi((np.asarray(r, dtype=float) - inner) / (radius - inner))

    def n2(x, y):
        return profile(np.hypot(x - center[0], y - center[1]))

    return RefractiveField(n2=n2, name="smooth-disk", indicator=indicator,
                           boundary=boundary, radial_profile=profile,
                           params={"radius": radius, "n0": n0, "inner": inner,
                                   "center": tuple(center)})


MEDIA = {
    "uniform": uniform,
    "star": star_index,
    "pikachu": pikachu_index,
    "constant_disk": constant_disk,
    "smooth_disk": smooth_disk,
}


def make_medium(preset, **params) -> RefractiveField:
    try:
        factory = MEDIA[preset]
    except KeyError:
        raise GeometryError(f"unknown medium {preset!r}; choose from {sorted(MEDIA)}")
    try:
        return factory(**params)
    except TypeError as exc:
        raise GeometryError(f"bad parameters for medium {preset!r}: {exc}") from exc


@dataclass(frozen=True)
class PlaneWave:
    """Incident plane wave ``amplitude * exp(i k d.x)``."""

    k: float
    direction: tuple = (1.0, 0.0)
    amplitude: complex = 1.0

    def __post_init__(self):
        if not self.k > 0:
            raise GeometryError("wavenumber must be positive")
        if abs(np.hypot(*self.direction) - 1.0) > 1e-10:
            raise GeometryError("incident direction must be a unit vector")

    @property
    def d(self):
        return np.asarray(self.direction, dtype=float)

    def __call__(self, points):
        p = np.asarray(points, dtype=float)
        return self.amplitude * np.exp(1j * self.k * (p @ self.d))

    def gradient(self, points):
        return (1j * self.k * self(points))[..., None] * self.d

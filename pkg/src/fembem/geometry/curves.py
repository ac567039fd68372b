"""Smooth closed 2*pi-periodic curves used as the BEM interface.

A curve is described by its position x(t) and its first two derivatives.
All evaluators are vectorised: for an input array ``t`` of shape ``S`` they
return arrays of shape ``S + (2,)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import GeometryError

TWO_PI = 2.0 * np.pi

CurveFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SmoothCurve:
    """2*pi-periodic regular parameterisation of a closed curve.

    Attributes
    ----------
    x, dx, ddx : callable
        Position and first/second derivative with respect to ``t``.
    name : str
        Human readable label (used in summaries).
    """

    x: CurveFn
    dx: CurveFn
    ddx: CurveFn
    name: str = "curve"

    def position(self, t):
        return self._checked(self.x, t)

    def tangent(self, t):
        return self._checked(self.dx, t)

    def second(self, t):
        return self._checked(self.ddx, t)

    def mu(self, t):
        """Scaled outward normal (x2', -x1') = |x'| nu."""
        d = self.tangent(t)
        return np.stack([d[..., 1], -d[..., 0]], axis=-1)

    def speed(self, t):
        return np.linalg.norm(self.tangent(t), axis=-1)

    def _checked(self, fn, t):
        t = np.mod(np.asarray(t, dtype=float), TWO_PI)
        out = np.asarray(fn(t), dtype=float)
        if not np.all(np.isfinite(out)):
            raise GeometryError(f"non-finite evaluation of curve {self.name!r}")
        return out

    def samples(self, n):
        t = TWO_PI * np.arange(n) / n
        return self.position(t)

    def signed_area(self, n=4096):
        p = self.samples(n)
        d = self.tangent(TWO_PI * np.arange(n) / n)
        # 1/2 \oint (x dy - y dx), trapezoidal rule is spectral here
        return 0.5 * np.mean(p[:, 0] * d[:, 1] - p[:, 1] * d[:, 0]) * TWO_PI

    def max_speed(self, n=1024):
        return float(self.speed(TWO_PI * np.arange(n) / n).max())

    def check(self, n=4096):
        """Validate periodicity, regularity and counter-clockwise orientation."""
        t = TWO_PI * np.arange(n) / n
        p0 = np.asarray(self.x(t), dtype=float)
        p1 = np.asarray(self.x(t + TWO_PI), dtype=float)
        scale = max(1.0, float(np.abs(p0).max()))
        if np.abs(p0 - p1).max() > 1e-10 * scale:
            raise GeometryError(f"curve {self.name!r} is not 2*pi-periodic")
        if self.speed(t).min() <= 0.0:
            raise GeometryError(f"curve {self.name!r} has a vanishing tangent")
        if self.signed_area(n) <= 0.0:
            raise GeometryError(f"curve {self.name!r} is not counter-clockwise")

    def contains(self, points, n=4096):
        """Point-in-curve test on a fine polygonal sampling."""
        from .mesh import points_in_polygon

        return points_in_polygon(points, self.samples(n))

    def rotated(self, angle, name=None):
        """The same curve rotated about the origin by ``angle``."""
        c, s = np.cos(angle), np.sin(angle)
        rot = np.array([[c, -s], [s, c]])

        def wrap(fn):
            return lambda t: np.asarray(fn(t)) @ rot.T

        return SmoothCurve(wrap(self.x), wrap(self.dx), wrap(self.ddx),
                           name or f"{self.name}-rot")


def eval_curve(curve: SmoothCurve, t):
    """Return ``(x(t), x'(t), mu(t))`` with ``mu = (x2', -x1')``."""
    return curve.position(t), curve.tangent(t), curve.mu(t)


def _stack(a, b):
    return np.stack(np.broadcast_arrays(a, b), axis=-1)


def circle(radius=1.0, center=(0.0, 0.0)) -> SmoothCurve:
    if radius <= 0:
        raise GeometryError("circle radius must be positive")
    cx, cy = float(center[0]), float(center[1])
    r = float(radius)
    return SmoothCurve(
        x=lambda t: _stack(cx + r * np.cos(t), cy + r * np.sin(t)),
        dx=lambda t: _stack(-r * np.sin(t), r * np.cos(t)),
        ddx=lambda t: _stack(-r * np.cos(t), -r * np.sin(t)),
        name=f"circle(r={r:g})",
    )


def ellipse(a=1.0, b=0.5, center=(0.0, 0.0)) -> SmoothCurve:
    if a <= 0 or b <= 0:
        raise GeometryError("ellipse semi-axes must be positive")
    cx, cy = float(center[0]), float(center[1])
    return SmoothCurve(
        x=lambda t: _stack(cx + a * np.cos(t), cy + b * np.sin(t)),
        dx=lambda t: _stack(-a * np.sin(t), b * np.cos(t)),
        ddx=lambda t: _stack(-a * np.cos(t), -b * np.sin(t)),
        name=f"ellipse(a={a:g},b={b:g})",
    )


def rounded_square(scale=7.0 * np.sqrt(2.0) / 4.0) -> SmoothCurve:
    """Diamond-like curve enclosing the second experiment's medium.

    x(t) = c ((1+cos^2 t) cos t + (1+sin^2 t) sin t,
              (1+sin^2 t) sin t - (1+cos^2 t) cos t)
    """
    c = float(scale)

    def pq(t):
        co, si = np.cos(t), np.sin(t)
        return co + co**3, si + si**3

    def dpq(t):
        co, si = np.cos(t), np.sin(t)
        return -si - 3 * co**2 * si, co + 3 * si**2 * co

    def ddpq(t):
        co, si = np.cos(t), np.sin(t)
        return (-co + 6 * co * si**2 - 3 * co**3,
                -si + 6 * si * co**2 - 3 * si**3)

    def combine(fn):
        def inner(t):
            p, q = fn(t)
            return _stack(c * (p + q), c * (q - p))
        return inner

    return SmoothCurve(combine(pq), combine(dpq), combine(ddpq),
                       name="rounded-square")


CURVES = {
    "circle": circle,
    "ellipse": ellipse,
    "rounded_square": rounded_square,
}


def make_curve(name, **params) -> SmoothCurve:
    try:
        factory = CURVES[name]
    except KeyError:
        raise GeometryError(f"unknown curve {name!r}; choose from {sorted(CURVES)}")
    try:
        curve = factory(**params)
    except TypeError as exc:
        raise GeometryError(f"bad parameters for curve {name!r}: {exc}") from exc
    curve.check()
    return curve

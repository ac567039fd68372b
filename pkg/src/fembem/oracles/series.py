"""Modal (Jacobi-Anger) reference solutions for scattering by a disk.

Sound-soft disk, penetrable disk of constant index, and penetrable disk of
arbitrary radial index profile (modes integrated as radial ODEs).  Nothing
here shares code with the FEM/BEM solvers apart from Bessel functions.

Scattered field:  u^s = sum_m i^m a_m H_m(kr) e^{i m (theta - theta_d)}
Far field (u^s ~ e^{ikr} r^{-1/2} F):
    F(theta) = sqrt(2/(pi k)) e^{-i pi/4} sum_m a_m e^{i m (theta - theta_d)}
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import h1vp, hankel1, jv, jvp

MAX_MODES = 200
COEFF_TOL = 1e-16


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class SeriesSolution:
    """Modal coefficients of one scattering configuration.

    ``kind`` is ``"sound-soft"``, ``"penetrable"`` (constant ``n0``) or
    ``"radial"`` (``profile(r) = n^2(r)``, constant ``n0**2`` for r <= ``inner``).
    """

    kind: str
    k: float
    radius: float
    coeffs: np.ndarray  # a_m for m = -M..M
    interior: np.ndarray  # scale of the interior mode (total field), same indexing
    n0: Optional[float] = None
    inner: float = 0.0
    profile: Optional[Callable] = None
    direction: float = 0.0  # incidence angle
    modes: dict = field(default_factory=dict, repr=False)

    @property
    def M(self):
        return (len(self.coeffs) - 1) // 2

    @property
    def orders(self):
        return np.arange(-self.M, self.M + 1)


def _sound_soft(m, k, a):
    return -jv(m, k * a) / hankel1(m, k * a)


def _penetrable(m, k, a, n0):
    ka, kna = k * a, k * n0 * a
    num = n0 * jvp(m, kna) * jv(m, ka) - jv(m, kna) * jvp(m, ka)
    den = n0 * jvp(m, kna) * hankel1(m, ka) - jv(m, kna) * h1vp(m, ka)
    a_m = -num / den
    # interior field b_m J_m(k n0 r), matched in value at r = a
    b_m = (jv(m, ka) + a_m * hankel1(m, ka)) / jv(m, kna) if jv(m, kna) != 0 else np.nan
    return a_m, b_m


def _radial_mode(m, k, a, n0, inner, profile, rtol=1e-12):
    """Integrate u'' + u'/r + (k^2 n^2(r) - m^2/r^2) u = 0 from ``inner`` to ``a``."""
    r0 = inner if inner > 0 else 1e-3 * a
    n_core = n0 if inner > 0 else float(np.sqrt(profile(r0)))
    # regular Bessel solution of the constant-index core as initial data
    u0 = jv(m, k * n_core * r0)
    du0 = k * n_core * jvp(m, k * n_core * r0)
    norm = float(np.hypot(u0, r0 * du0))
    if norm == 0.0:
        raise SeriesError(f"mode {m} underflows at the core radius")

    def rhs(r, y):
        return [y[1], -y[1] / r - (k**2 * profile(r) - m**2 / r**2) * y[0]]

    sol = solve_ivp(rhs, (r0, a), [u0 / norm, du0 / norm], method="DOP853", rtol=rtol,
                    atol=1e-14, dense_output=True)
    if not sol.success:
        raise SeriesError(f"radial ODE for mode {m} failed: {sol.message}")
    sol.norm = norm
    ua, dua = sol.y[0, -1], sol.y[1, -1]
    ka = k * a
    num = dua * jv(m, ka) - ua * k * jvp(m, ka)
    den = dua * hankel1(m, ka) - ua * k * h1vp(m, ka)
    a_m = -num / den
    scale = (jv(m, ka) + a_m * hankel1(m, ka)) / ua
    return a_m, scale, sol


def mie_solution(kind, k, radius=1.0, n0=None, inner=0.0, profile=None,
                 direction=0.0, max_modes=MAX_MODES, extra_modes=0) -> SeriesSolution:
    """Build the modal expansion.

    The sum is truncated at the first m > k a where both |a_m| < 1e-16 max|a_m|
    and |J_m(k a)| < 1e-16, so that near fields (incident and interior parts)
    are resolved as well as the far field.
    """
    if k <= 0 or radius <= 0:
        raise SeriesError("k and radius must be positive")
    if kind == "sound-soft":
        if n0 is not None or profile is not None:
            raise SeriesError("a sound-soft disk takes no index parameters")
    elif kind == "penetrable":
        if n0 is None or n0 <= 0:
            raise SeriesError("a penetrable disk needs a positive index n0")
    elif kind == "radial":
        if profile is None or n0 is None:
            raise SeriesError("a radial profile needs profile(r) and the core index n0")
    else:
        raise SeriesError(f"unknown series kind {kind!r}")

    a_list, b_list, modes = [], [], {}
    peak = 0.0
    M = None
    for m in range(0, max_modes + 1):
        if kind == "sound-soft":
            am, bm = _sound_soft(m, k, radius), 0.0
        elif kind == "penetrable":
            am, bm = _penetrable(m, k, radius, n0)
        else:
            am, bm, sol = _radial_mode(m, k, radius, n0, inner, profile)
            modes[m] = sol
        a_list.append(am)
        b_list.append(bm)
        peak = max(peak, abs(am))
        if (m > k * radius and abs(am) <= COEFF_TOL * peak
                and abs(jv(m, k * radius)) < COEFF_TOL):
            M = m
            break
    if M is None:
        raise SeriesError(f"series did not converge within {max_modes} modes")
    for m in range(M + 1, M + 1 + extra_modes):
        if kind == "sound-soft":
            am, bm = _sound_soft(m, k, radius), 0.0
        elif kind == "penetrable":
            am, bm = _penetrable(m, k, radius, n0)
        else:
            am, bm, sol = _radial_mode(m, k, radius, n0, inner, profile)
            modes[m] = sol
        a_list.append(am)
        b_list.append(bm)
    a_pos = np.array(a_list, dtype=complex)
    b_pos = np.array(b_list, dtype=complex)
    # a_{-m} = a_m for these rotationally symmetric problems
    coeffs = np.concatenate([a_pos[:0:-1], a_pos])
    interior = np.concatenate([b_pos[:0:-1], b_pos])
    return SeriesSolution(kind=kind, k=float(k), radius=float(radius), coeffs=coeffs,
                          interior=interior, n0=n0, inner=inner, profile=profile,
                          direction=float(direction), modes=modes)


def mie_far_field(sol: SeriesSolution, angles):
    theta = np.asarray(angles, dtype=float)
    m = sol.orders
    phase = np.exp(1j * np.outer(theta - sol.direction, m))
    return np.sqrt(2 / (np.pi * sol.k)) * np.exp(-0.25j * np.pi) * (phase @ sol.coeffs)


def mie_near_field(sol: SeriesSolution, points, scattered=False):
    """Total field (or scattered field outside the disk) at points."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.hypot(p[:, 0], p[:, 1])
    th = np.arctan2(p[:, 1], p[:, 0]) - sol.direction
    k, a = sol.k, sol.radius
    out = np.zeros(len(p), dtype=complex)
    outside = r >= a
    if not scattered:
        # the incident wave is summed exactly rather than through its truncated expansion
        po = p[outside]
        d = np.array([np.cos(sol.direction), np.sin(sol.direction)])
        out[outside] = np.exp(1j * k * (po @ d))
    for m, am, bm in zip(sol.orders, sol.coeffs, sol.interior):
        ang = (1j) ** m * np.exp(1j * m * th)
        out[outside] += ang[outside] * am * hankel1(m, k * r[outside])
        ins = ~outside
        if not ins.any():
            continue
        ri = r[ins]
        if sol.kind == "sound-soft":
            continue
        if sol.kind == "penetrable":
            out[ins] += ang[ins] * bm * jv(m, k * sol.n0 * ri)
        else:
            # J_{-m} = (-1)^m J_m carries over to the radial solutions
            sign = (-1.0) ** abs(m) if m < 0 else 1.0
            out[ins] += ang[ins] * bm * sign * _radial_values(sol, abs(m), ri)
    return out


def _radial_values(sol, m, r):
    ode = sol.modes[m]
    k, r0 = sol.k, max(sol.inner, 1e-3 * sol.radius)
    n_core = sol.n0 if sol.inner > 0 else float(np.sqrt(sol.profile(r0)))
    vals = np.empty(len(r))
    core = r <= r0
    if core.any():
        vals[core] = jv(m, k * n_core * r[core]) / ode.norm
    if (~core).any():
        vals[~core] = ode.sol(r[~core])[0]
    return vals


def optical_theorem_sides(sol: SeriesSolution, n_angles=4096):
    """(integral of |F|^2 over directions, -sqrt(8 pi / k) Re(e^{i pi/4} F(forward)))."""
    theta = 2 * np.pi * np.arange(n_angles) / n_angles + sol.direction
    F = mie_far_field(sol, theta)
    lhs = 2 * np.pi * np.mean(np.abs(F) ** 2)
    rhs = -np.sqrt(8 * np.pi / sol.k) * np.real(np.exp(0.25j * np.pi) * F[0])
    return lhs, rhs

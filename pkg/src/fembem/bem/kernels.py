"""Log-splitting of the parameterised Helmholtz layer kernels.

For s != t,

    Phi_k(x(s) - x(t)) w(t)                  = A log sin^2((s-t)/2) + B
    grad_y Phi_k(x(s) - y)|_{y=x(t)} . mu(t) = C log sin^2((s-t)/2) + D

with A, B, C, D smooth and 2*pi bi-periodic.  ``w`` is |x'(t)| when the
Jacobian is folded into the kernel and 1 when it lives in the density.
"""

from __future__ import annotations

import numpy as np
from scipy.special import hankel1, j0, j1

EULER_GAMMA = np.euler_gamma


def split_from_geometry(k, delta, xs, xt, dxt, ddxt, jacobian=True, diag=None):
    """Split kernels from sampled geometry; all arrays broadcast together.

    ``delta`` = s - t.  ``diag`` marks entries with s == t (mod 2 pi); if
    omitted it is detected from ``delta``.
    """
    diff = xs - xt
    r = np.sqrt(np.sum(diff**2, axis=-1))
    speed = np.sqrt(np.sum(dxt**2, axis=-1))
    mu = np.stack([dxt[..., 1], -dxt[..., 0]], axis=-1)
    if diag is None:
        diag = np.abs(np.sin(0.5 * np.asarray(delta))) < 1e-15
    diag = np.broadcast_to(diag, r.shape)
    off = ~diag
    rs = np.where(off, r, 1.0)
    logsin = np.where(off, np.log(np.where(off, np.sin(0.5 * delta) ** 2, 1.0)), 0.0)
    w = speed if jacobian else np.ones_like(speed)

    kr = k * rs
    A = -j0(kr) / (4 * np.pi) * w
    phi = 0.25j * hankel1(0, kr)
    B = phi * w - A * logsin
    B_diag = (0.25j - (EULER_GAMMA + np.log(k * speed)) / (2 * np.pi)) * w
    A = np.where(off, A, -w / (4 * np.pi))
    B = np.where(off, B, B_diag)

    proj = np.sum(mu * diff, axis=-1) / rs
    C = np.where(off, -k / (4 * np.pi) * j1(kr) * proj, 0.0)
    Kfull = 0.25j * k * hankel1(1, kr) * proj
    curv = np.sum(mu * ddxt, axis=-1) / speed**2
    D = np.where(off, Kfull - C * logsin, curv / (4 * np.pi))
    return A, B, C.astype(complex), D


def split_kernels(curve, k, s, t, jacobian=True):
    """Smooth kernels (A, B, C, D) at parameters (s, t); broadcasts over arrays."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    s, t = np.broadcast_arrays(s, t)
    return split_from_geometry(k, s - t, curve.position(s), curve.position(t),
                               curve.tangent(t), curve.second(t), jacobian=jacobian)

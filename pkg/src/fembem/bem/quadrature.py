"""Trigonometric quadrature on the uniform periodic grid t_j = pi j / N."""

from __future__ import annotations

import numpy as np


def grid_nodes(N):
    """The 2N nodes t_j = pi j / N, j = -N+1, ..., N."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    return np.pi * np.arange(-N + 1, N + 1) / N


def trapezoid_weight(N):
    return np.pi / N


def log_weight_row(N, s):
    """Weights R_j(s) for the log-singular rule.

    sum_j R_j(s) g(t_j) equals the integral over [0, 2 pi] of
    Q_N g(t) log sin^2((s - t)/2) for every g in the trigonometric space.
    ``s`` may be an array; the result then has shape ``s.shape + (2N,)``.
    Uses -1/(2 pi) int log sin^2(t/2) e^{i l t} dt = log 4 (l = 0), 1/|l| (l != 0).
    """
    s = np.asarray(s, dtype=float)
    t = grid_nodes(N)
    diff = s[..., None] - t
    m = np.arange(1, N)
    acc = np.zeros(diff.shape)
    for mm in m:
        acc += np.cos(mm * diff) / mm
    return (-np.pi / N) * np.log(4.0) - (2 * np.pi / N) * acc - (np.pi / N**2) * np.cos(N * diff)


def log_weight_matrix(N):
    """R[i, j] = R_j(t_i); a symmetric circulant matrix."""
    return log_weight_row(N, grid_nodes(N))


def trig_interpolate(N, values, s):
    """Evaluate the trigonometric interpolant Q_N of nodal ``values`` at ``s``.

    Uses the Lagrange basis
    L_j(s) = (1 / 2N) [1 + 2 sum_{m=1}^{N-1} cos(m (s - t_j)) + cos(N (s - t_j))].
    """
    s = np.asarray(s, dtype=float)
    diff = s[..., None] - grid_nodes(N)
    acc = np.ones(diff.shape)
    for m in range(1, N):
        acc += 2 * np.cos(m * diff)
    acc += np.cos(N * diff)
    return (acc / (2 * N)) @ np.asarray(values)

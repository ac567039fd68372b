"""Unrestarted GMRES with modified Gram-Schmidt and one reorthogonalisation pass."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import SolverError

logger = logging.getLogger(__name__)


@dataclass
class GmresResult:
    x: np.ndarray
    iterations: int
    residuals: list = field(default_factory=list)  # relative residual after each iteration
    converged: bool = True


def _givens(a, b):
    """Complex rotation (c, s) with [c s; -conj(s) c] [a; b] = [r; 0], c real."""
    if b == 0:
        return 1.0, 0.0
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    na = abs(a)
    nrm = np.hypot(na, abs(b))
    c = na / nrm
    s = (a / na) * np.conj(b) / nrm
    return c, s


def gmres(apply, b, tol=1e-8, max_iter=None, callback=None) -> GmresResult:
    """Solve ``apply(x) = b`` from the zero initial guess.

    Parameters
    ----------
    apply : callable
        Matrix-vector product.
    b : ndarray
        Right-hand side.
    tol : float
        Target for ||b - A x|| / ||b||.
    max_iter : int, optional
        Iteration cap, defaults to ``10 * len(b)``.
    callback : callable, optional
        Called as ``callback(iteration, relative_residual)``.

    Raises
    ------
    SolverError
        If the cap is reached first; the residual history is attached.
    """
    b = np.asarray(b, dtype=complex)
    n = len(b)
    if max_iter is None:
        max_iter = 10 * n
    beta = np.linalg.norm(b)
    if beta == 0.0:
        return GmresResult(np.zeros(n, dtype=complex), 0, [])
    # the Krylov space cannot exceed the dimension
    m_max = min(max_iter, n)
    V = np.zeros((m_max + 1, n), dtype=complex)
    H = np.zeros((m_max + 1, m_max), dtype=complex)
    cs = np.zeros(m_max)
    sn = np.zeros(m_max, dtype=complex)
    g = np.zeros(m_max + 1, dtype=complex)
    g[0] = beta
    V[0] = b / beta
    history = []
    j = 0
    for j in range(m_max):
        w = np.asarray(apply(V[j]), dtype=complex)
        for _ in range(2):
            for i in range(j + 1):
                hij = np.vdot(V[i], w)
                H[i, j] += hij
                w = w - hij * V[i]
        H[j + 1, j] = np.linalg.norm(w)
        if H[j + 1, j] > 0:
            V[j + 1] = w / H[j + 1, j]
        for i in range(j):
            hi, hi1 = H[i, j], H[i + 1, j]
            H[i, j] = cs[i] * hi + sn[i] * hi1
            H[i + 1, j] = -np.conj(sn[i]) * hi + cs[i] * hi1
        cs[j], sn[j] = _givens(H[j, j], H[j + 1, j])
        H[j, j] = cs[j] * H[j, j] + sn[j] * H[j + 1, j]
        H[j + 1, j] = 0.0
        g[j + 1] = -np.conj(sn[j]) * g[j]
        g[j] = cs[j] * g[j]
        rel = abs(g[j + 1]) / beta
        history.append(float(rel))
        if callback is not None:
            callback(j + 1, float(rel))
        if rel <= tol or H[j, j] == 0 or j + 1 == m_max:
            break
    m = j + 1
    y = np.linalg.solve(np.triu(H[:m, :m]), g[:m]) if m else np.zeros(0)
    x = V[:m].T @ y
    converged = history[-1] <= tol
    if not converged:
        raise SolverError(
            f"GMRES did not reach relative residual {tol:g} in {m} iterations "
            f"(last {history[-1]:.3e})", history=history)
    return GmresResult(x, m, history, True)

"""Convergence tables of far-field errors over mesh levels and BEM grid sizes."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from .series import mie_far_field, mie_solution

logger = logging.getLogger(__name__)

TRUTHS = ("auto", "series", "self")


@dataclass
class ConvergenceRow:
    level: int
    N: int
    L: int
    M: int
    h: float
    error: float
    iterations: int
    order: float = float("nan")


@dataclass
class ConvergenceTable:
    rows: list
    truth: str
    degree: int
    k: float
    meta: dict = field(default_factory=dict)

    @property
    def has_orders(self):
        return len({r.level for r in self.rows}) > 1

    def columns(self):
        cols = ["level", "N", "L", "M", "h", "error", "iterations"]
        return cols + ["order"] if self.has_orders else cols

    def _cells(self, row):
        cells = [str(row.level), str(row.N), str(row.L), str(row.M), f"{row.h:.4g}",
                 f"{row.error:.3e}", str(row.iterations)]
        if self.has_orders:
            cells.append("" if np.isnan(row.order) else f"{row.order:.2f}")
        return cells

    def to_text(self):
        head = self.columns()
        body = [self._cells(r) for r in self.rows]
        widths = [max(len(c) for c in col) for col in zip(head, *body)]
        lines = ["  ".join(c.rjust(w) for c, w in zip(line, widths)) for line in [head] + body]
        return "\n".join(lines) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns())
        for r in self.rows:
            writer.writerow(self._cells(r))
        return buf.getvalue()

    def errors(self, N):
        return np.array([r.error for r in self.rows if r.N == N])

    def orders(self, N):
        return np.array([r.order for r in self.rows if r.N == N and not np.isnan(r.order)])


def observed_orders(h, err):
    """log(e_i / e_{i+1}) / log(h_i / h_{i+1}) for consecutive entries."""
    h, err = np.asarray(h, float), np.asarray(err, float)
    return np.log(err[:-1] / err[1:]) / np.log(h[:-1] / h[1:])


def fitted_order(h, err):
    """Least-squares slope of log(err) against log(h)."""
    return float(np.polyfit(np.log(h), np.log(err), 1)[0])


def series_truth(cfg):
    """Series oracle matching a configuration, or None when none applies."""
    preset = cfg.medium.preset
    params = dict(cfg.medium.params)
    center = tuple(params.pop("center", (0.0, 0.0)))
    if preset not in ("uniform", "constant_disk", "smooth_disk") or any(center):
        return None
    d = cfg.wave.direction
    direction = float(np.arctan2(d[1], d[0]))
    k = cfg.wave.k
    if preset == "uniform":
        return mie_solution("penetrable", k, 1.0, n0=1.0, direction=direction)
    from ..geometry.media import make_medium

    med = make_medium(preset, **params)
    p = med.params
    if preset == "constant_disk":
        return mie_solution("penetrable", k, p["radius"], n0=p["n0"], direction=direction)
    return mie_solution("radial", k, p["radius"], n0=p["n0"], inner=p["inner"],
                        profile=med.radial_profile, direction=direction)


def convergence_study(cfg, levels, Ns, truth="auto", n_angles=1000, runner=None):
    """Far-field errors for every (level, N) pair.

    The truth is the series oracle when the medium is a centred disk (or
    homogeneous), otherwise the pipeline itself at the next refinement level
    with the largest N.  Errors are max |F - F_true| over ``n_angles``
    directions, divided by max |F_true| when that is non-zero.
    """
    if truth not in TRUTHS:
        raise ConfigurationError(f"unknown truth {truth!r}; choose from {TRUTHS}")
    levels = sorted(int(v) for v in levels)
    Ns = sorted(int(v) for v in Ns)
    if not levels or not Ns:
        raise ConfigurationError("at least one level and one N are required")
    if runner is None:
        from ..run import run_pipeline as runner

    amp = cfg.wave.amplitude
    series = series_truth(cfg) if truth in ("auto", "series") else None
    if truth == "series" and series is None:
        raise ConfigurationError("no series oracle for this medium; use truth='self'")
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    if series is not None:
        F_true = amp * mie_far_field(series, theta)
        used = "series"
    else:
        ref = runner(cfg, level=levels[-1] + 1, N=Ns[-1], n_angles=n_angles)
        F_true = ref.far_field
        used = "self"
    scale = np.abs(F_true).max()
    rows = []
    for N in Ns:
        prev = None
        for lev in levels:
            res = runner(cfg, level=lev, N=N, n_angles=n_angles)
            err = float(np.abs(res.far_field - F_true).max() / (scale if scale > 0 else 1.0))
            mesh = res.problem.mesh
            row = ConvergenceRow(level=lev, N=N, L=mesh.n_free, M=mesh.n_dirichlet, h=mesh.h,
                                 error=err, iterations=res.state.iterations)
            if prev is not None and prev.error > 0 and err > 0:
                row.order = float(observed_orders([prev.h, row.h], [prev.error, err])[0])
            rows.append(row)
            prev = row
            logger.info("level %d N %d: error %.3e, %d iterations", lev, N, err,
                        row.iterations)
    return ConvergenceTable(rows=rows, truth=used, degree=cfg.geometry.degree, k=cfg.wave.k)

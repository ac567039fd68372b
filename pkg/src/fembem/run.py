"""Configuration-driven pipeline: mesh, assemble, solve, reconstruct, far field."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .bem import unit_directions
from .config import RunConfig
from .coupling import (build_problem, overlap_consistency, reconstruct, solve_interface,
                       state_far_field)
from .fem import eval_field_on_grid
from .geometry import PlaneWave, build_structured_mesh, make_curve, make_medium

logger = logging.getLogger(__name__)


def _params(d):
    return {k: (tuple(v) if isinstance(v, (list, tuple)) else v) for k, v in d.items()}


def make_geometry(cfg: RunConfig, level=None):
    """(mesh, curve, medium) described by a configuration."""
    g = cfg.geometry
    curve = make_curve(g.curve.name, **_params(g.curve.params))
    medium = make_medium(cfg.medium.preset, **_params(cfg.medium.params))
    lev = g.level if level is None else level
    mesh = build_structured_mesh(g.rectangle, lev, g.degree, hetero=medium,
                                 divisions=g.divisions)
    return mesh, curve, medium


def make_wave(cfg: RunConfig):
    w = cfg.wave
    return PlaneWave(w.k, tuple(w.direction), w.amplitude)


@dataclass
class RunResult:
    problem: object
    state: object
    interior: object  # FemSolution
    density: np.ndarray
    theta: np.ndarray
    far_field: np.ndarray
    timings: dict = field(default_factory=dict)
    log: list = field(default_factory=list)

    def summary(self):
        out = dict(self.problem.summary())
        out.update(self.state.diagnostics())
        out["timings"] = {**self.problem.timings, **self.state.timings, **self.timings}
        if self.problem.nesting is not None:
            out["nesting"] = self.problem.nesting.as_dict()
        return out


def run_pipeline(cfg: RunConfig, level=None, N=None, method=None, tol=None,
                 n_angles=None) -> RunResult:
    t0 = time.perf_counter()
    mesh, curve, medium = make_geometry(cfg, level)
    wave = make_wave(cfg)
    problem = build_problem(mesh, curve, N or cfg.solver.N, wave, medium)
    log = []
    state = solve_interface(problem, method or cfg.solver.method, tol or cfg.solver.tol,
                            log=log)
    t1 = time.perf_counter()
    u_h, phi = reconstruct(problem, state)
    theta, dirs = unit_directions(n_angles or cfg.outputs.far_field_angles)
    F = state_far_field(problem, phi, dirs)
    timings = {"reconstruct": time.perf_counter() - t1, "total": time.perf_counter() - t0}
    return RunResult(problem, state, u_h, phi, theta, F, timings, log)


def overlap_report(result: RunResult, count, seed=0, margin=0.0):
    defect = overlap_consistency(result.problem, result.state, count, seed=seed,
                                 margin=margin, fields=(result.interior, result.density))
    return {"samples": int(count), "seed": int(seed), "margin": float(margin),
            "max_defect": defect}


def interior_raster(result: RunResult, nx, ny):
    """Interior total field on a regular grid over the FEM rectangle (NaN outside)."""
    poly = result.problem.mesh.sigma_polygon
    xs = np.linspace(poly[:, 0].min(), poly[:, 0].max(), nx)
    ys = np.linspace(poly[:, 1].min(), poly[:, 1].max(), ny)
    return xs, ys, eval_field_on_grid(result.interior, xs, ys)

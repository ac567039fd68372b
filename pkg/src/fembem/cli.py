"""Command-line driver.

Subcommands::

    fembem solve --config run.yaml [--solver gmres|direct] [--tol X] [--out DIR]
    fembem convergence --config run.yaml --levels 0,1,2 --N 20,40
    fembem oracle --kind sound-soft --k 3.14159 --radius 1
    fembem validate --config run.yaml

Exit status: 0 on success, 2 for configuration errors, 3 for solver failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config, parse_wavenumber
from .errors import (AssemblyError, ConfigurationError, GeometryError, LocationError,
                     ResonanceError, SolverError)

logger = logging.getLogger("fembem")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3

FARFIELD_HEADER = "theta,re,im,abs"


def _fmt(x):
    # adding 0.0 turns -0.0 into 0.0 so that zero fields print identically
    return repr(float(x) + 0.0)


def farfield_csv(theta, F):
    lines = [FARFIELD_HEADER]
    for t, f in zip(theta, F):
        lines.append(",".join([_fmt(t), _fmt(f.real), _fmt(f.imag), _fmt(abs(f))]))
    return "\n".join(lines) + "\n"


class Artifacts:
    """Writes files below one directory, refusing to replace files unless allowed."""

    def __init__(self, directory, overwrite=False):
        self.root = Path(directory)
        self.overwrite = overwrite

    def path(self, name):
        return self.root / name

    def check(self, names):
        if self.overwrite:
            return
        existing = [n for n in names if self.path(n).exists()]
        if existing:
            raise ConfigurationError(
                f"{', '.join(existing)} already exist in {self.root}; pass --overwrite to replace")

    def write_text(self, name, text):
        self.root.mkdir(parents=True, exist_ok=True)
        self.path(name).write_text(text)
        logger.info("wrote %s", self.path(name))

    def write_json(self, name, data):
        self.write_text(name, json.dumps(data, indent=2, sort_keys=True) + "\n")


ARTIFACT_FILES = {
    "farfield": "farfield.csv",
    "solver_log": "solver_log.csv",
    "summary": "summary.json",
    "raster": "raster.npz",
    "overlap": "overlap.json",
}


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def cmd_solve(args):
    from .run import interior_raster, overlap_report, run_pipeline

    cfg = load_config(args.config)
    updates = {}
    if args.solver:
        updates.setdefault("solver", {})["method"] = args.solver
    if args.tol is not None:
        updates.setdefault("solver", {})["tol"] = args.tol
    if args.N is not None:
        updates.setdefault("solver", {})["N"] = args.N
    if args.level is not None:
        updates.setdefault("geometry", {})["level"] = args.level
    if args.out:
        updates.setdefault("outputs", {})["directory"] = args.out
    if updates:
        cfg = _updated(cfg, updates)
    out = Artifacts(cfg.outputs.directory, args.overwrite)
    wanted = list(dict.fromkeys(cfg.outputs.artifacts))
    out.check([ARTIFACT_FILES[a] for a in wanted])

    result = run_pipeline(cfg)
    if "farfield" in wanted:
        out.write_text("farfield.csv", farfield_csv(result.theta, result.far_field))
    if "solver_log" in wanted:
        lines = ["iter,residual"] + [f"{i},{r:.6e}" for i, r in result.log]
        out.write_text("solver_log.csv", "\n".join(lines) + "\n")
    overlap = None
    if "overlap" in wanted:
        overlap = overlap_report(result, cfg.outputs.overlap_samples, cfg.outputs.seed,
                                 cfg.outputs.overlap_margin)
        out.write_json("overlap.json", overlap)
    if "raster" in wanted:
        nx, ny = cfg.outputs.raster
        xs, ys, U = interior_raster(result, nx, ny)
        out.root.mkdir(parents=True, exist_ok=True)
        np.savez(out.path("raster.npz"), x=xs, y=ys, u=U)
    summary = result.summary()
    if overlap is not None:
        summary["overlap"] = overlap
    if "summary" in wanted:
        out.write_json("summary.json", summary)
    print(f"L={summary['L']} M={summary['M']} N={summary['N']} "
          f"iterations={summary['iterations']} residual={summary['residual']:.3e}")
    return EXIT_OK


def _updated(cfg, updates):
    try:
        return cfg.with_updates(**updates)
    except Exception as exc:  # pydantic ValidationError
        raise ConfigurationError(f"invalid override: {exc}") from exc


def cmd_convergence(args):
    from .oracles.convergence import convergence_study

    cfg = load_config(args.config)
    if args.out:
        cfg = _updated(cfg, {"outputs": {"directory": args.out}})
    out = Artifacts(cfg.outputs.directory, args.overwrite)
    out.check(["convergence.txt", "convergence.csv"])
    table = convergence_study(cfg, args.levels, args.N, truth=args.truth,
                              n_angles=cfg.outputs.far_field_angles)
    text = table.to_text()
    out.write_text("convergence.txt", text)
    out.write_text("convergence.csv", table.to_csv())
    print(f"truth: {table.truth}")
    print(text, end="")
    return EXIT_OK


def cmd_oracle(args):
    from .oracles.series import mie_far_field, mie_solution

    if args.kind == "sound-soft" and args.n0 is not None:
        raise ConfigurationError("--n0 is meaningless for a sound-soft disk")
    if args.kind == "penetrable" and args.n0 is None:
        raise ConfigurationError("a penetrable disk needs --n0")
    if args.n0 is not None and not args.n0 > 0:
        raise ConfigurationError("--n0 must be positive")
    try:
        k = parse_wavenumber(args.k)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc
    if not k > 0 or not args.radius > 0 or args.angles < 1:
        raise ConfigurationError("k, radius and the angle count must be positive")
    out = Artifacts(args.out, args.overwrite)
    out.check(["farfield.csv"])
    sol = mie_solution(args.kind, k, args.radius, n0=args.n0, direction=args.direction)
    theta = 2 * np.pi * np.arange(args.angles) / args.angles
    out.write_text("farfield.csv", farfield_csv(theta, mie_far_field(sol, theta)))
    print(f"{args.kind} disk, k={k:g}, a={args.radius:g}: {2 * sol.M + 1} modes")
    return EXIT_OK


def cmd_validate(args):
    from .geometry.nesting import validate_nesting
    from .run import make_geometry, make_wave

    cfg = load_config(args.config)
    mesh, curve, medium = make_geometry(cfg)
    make_wave(cfg)
    report = validate_nesting(curve, mesh, medium)
    print(json.dumps({"valid": True, "L": mesh.n_free, "M": mesh.n_dirichlet,
                      **report.as_dict()}, sort_keys=True))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="fembem", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one configuration and write its artifacts")
    p.add_argument("--config", required=True)
    p.add_argument("--solver", choices=["gmres", "direct"])
    p.add_argument("--tol", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--level", type=int)
    p.add_argument("--out")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("convergence", help="far-field errors over levels and N")
    p.add_argument("--config", required=True)
    p.add_argument("--levels", type=_int_list, required=True)
    p.add_argument("--N", type=_int_list, required=True)
    p.add_argument("--truth", choices=["auto", "series", "self"], default="auto")
    p.add_argument("--out")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("oracle", help="series far field of a disk")
    p.add_argument("--kind", choices=["sound-soft", "penetrable"], required=True)
    p.add_argument("--k", required=True)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--n0", type=float)
    p.add_argument("--direction", type=float, default=0.0, help="incidence angle in radians")
    p.add_argument("--angles", type=int, default=1000)
    p.add_argument("--out", default="oracle")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("validate", help="check a configuration without solving")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, GeometryError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, ResonanceError, AssemblyError, LocationError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except Exception as exc:  # series non-convergence and other numerical failures
        from .oracles.series import SeriesError

        if isinstance(exc, SeriesError):
            print(f"solver error: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        raise


if __name__ == "__main__":
    sys.exit(main())

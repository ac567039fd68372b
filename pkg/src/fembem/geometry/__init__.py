"""Curves, meshes, media and incident waves."""

from .curves import SmoothCurve, circle, ellipse, eval_curve, make_curve, rounded_square
from .media import (PlaneWave, RefractiveField, chi, chi_tilde, constant_disk,
                    eval_refractive, make_medium, pikachu_index, smooth_disk,
                    star_index, uniform)
from .mesh import (TriMesh, build_structured_mesh, from_triangles, load_mesh,
                   points_in_polygon, quadrisect, save_mesh)
from .nesting import NestingReport, validate_nesting

__all__ = [
    "SmoothCurve", "circle", "ellipse", "eval_curve", "make_curve", "rounded_square",
    "PlaneWave", "RefractiveField", "chi", "chi_tilde", "constant_disk",
    "eval_refractive", "make_medium", "pikachu_index", "smooth_disk", "star_index",
    "uniform", "TriMesh", "build_structured_mesh", "from_triangles", "load_mesh",
    "points_in_polygon", "quadrisect", "save_mesh", "NestingReport", "validate_nesting",
]

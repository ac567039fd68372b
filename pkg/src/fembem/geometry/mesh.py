"""Conforming triangulations with degree-d Lagrange nodes.

The FEM domain is a single polygon whose boundary is the artificial
Dirichlet interface.  Meshes are built on a structured rectangle (and refined
by quadrisection) or loaded from Triangle-style ``.node``/``.ele`` files; in
both cases higher-order nodes are generated here.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import MeshError

logger = logging.getLogger(__name__)

MAX_DEGREE = 4


# ---------------------------------------------------------------------------
# small polygon utilities
# ---------------------------------------------------------------------------

def points_in_polygon(points, polygon):
    """Even-odd ray casting; vectorised over points, looped over edges."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    poly = np.asarray(polygon, dtype=float)
    x, y = p[:, 0], p[:, 1]
    inside = np.zeros(len(p), dtype=bool)
    xa, ya = poly[:, 0], poly[:, 1]
    xb, yb = np.roll(xa, -1), np.roll(ya, -1)
    for x0, y0, x1, y1 in zip(xa, ya, xb, yb):
        crosses = (y0 > y) != (y1 > y)
        if not np.any(crosses):
            continue
        xc = x0 + (y[crosses] - y0) * (x1 - x0) / (y1 - y0)
        flip = np.zeros_like(inside)
        flip[crosses] = x[crosses] < xc
        inside ^= flip
    return inside


def sample_polygon(polygon, n):
    """``n`` points spread uniformly by arc length along a closed polygon."""
    poly = np.asarray(polygon, dtype=float)
    seg = np.roll(poly, -1, axis=0) - poly
    lengths = np.linalg.norm(seg, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    s = np.arange(n) * cum[-1] / n
    idx = np.searchsorted(cum, s, side="right") - 1
    frac = (s - cum[idx]) / lengths[idx]
    return poly[idx] + frac[:, None] * seg[idx]


def distance_to_segments(points, a, b):
    """Distance from each point to the closest of the segments [a_i, b_i]."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    best = np.full(len(p), np.inf)
    ab = b - a
    den = np.einsum("ij,ij->i", ab, ab)
    for i in range(len(a)):
        t = np.clip(((p - a[i]) @ ab[i]) / den[i], 0.0, 1.0)
        d = np.linalg.norm(p - (a[i] + t[:, None] * ab[i]), axis=1)
        np.minimum(best, d, out=best)
    return best


def polygon_area(polygon):
    x, y = np.asarray(polygon, dtype=float).T
    return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)


# ---------------------------------------------------------------------------
# Lagrange lattice
# ---------------------------------------------------------------------------

def local_lattice(d):
    """Barycentric integer triples (b0, b1, b2), b0+b1+b2 = d, in local order.

    Order: the three vertices, then the nodes of edges (0,1), (1,2), (2,0)
    walking from the first to the second vertex, then interior nodes.
    """
    pts = [(d, 0, 0), (0, d, 0), (0, 0, d)]
    pts += [(d - s, s, 0) for s in range(1, d)]
    pts += [(0, d - s, s) for s in range(1, d)]
    pts += [(s, 0, d - s) for s in range(1, d)]
    pts += [(d - i - j, i, j) for i in range(1, d) for j in range(1, d - i)]
    return np.array(pts, dtype=int)


def reference_nodes(d):
    """Local nodes in reference coordinates (xi, eta) = (b1/d, b2/d)."""
    lat = local_lattice(d)
    return lat[:, 1:] / float(d)


LOCAL_EDGES = ((0, 1), (1, 2), (2, 0))


# ---------------------------------------------------------------------------
# the mesh
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TriMesh:
    """Degree-d Lagrange triangulation of the FEM polygon.

    ``elements[e]`` lists the global node indices of triangle ``e`` in the
    order given by :func:`local_lattice`.  ``dirichlet`` are the nodes on the
    boundary polygon (count M), ``free`` the remaining nodes (count L).
    """

    vertices: np.ndarray
    triangles: np.ndarray
    degree: int
    nodes: np.ndarray
    elements: np.ndarray
    dirichlet: np.ndarray
    free: np.ndarray
    boundary_loop: np.ndarray
    straddling: tuple = ()
    level: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def n_free(self):
        return len(self.free)

    @property
    def n_dirichlet(self):
        return len(self.dirichlet)

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def sigma_polygon(self):
        return self.vertices[self.boundary_loop]

    @property
    def h(self):
        v = self.vertices[self.triangles]
        e = np.linalg.norm(v - np.roll(v, -1, axis=1), axis=2)
        return float(e.max())

    def areas(self):
        v = self.vertices[self.triangles]
        d1, d2 = v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def contains(self, points):
        return points_in_polygon(points, self.sigma_polygon)

    def with_degree(self, d):
        return from_triangles(self.vertices, self.triangles, d, level=self.level,
                              straddling=self.straddling)


def check_topology(vertices, triangles):
    """Raise :class:`MeshError` on inverted, degenerate, duplicated or non-manifold triangles."""
    v = np.asarray(vertices, dtype=float)
    tri = np.asarray(triangles, dtype=int)
    if tri.ndim != 2 or tri.shape[1] != 3:
        raise MeshError("triangles must be an (n, 3) index array")
    if tri.min() < 0 or tri.max() >= len(v):
        raise MeshError("triangle references a missing vertex")
    p = v[tri]
    d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    area = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    scale = np.max(np.linalg.norm(p - np.roll(p, -1, axis=1), axis=2), axis=1) ** 2
    bad = np.flatnonzero(np.abs(area) <= 1e-14 * scale)
    if len(bad):
        raise MeshError(f"degenerate triangle(s) {bad[:10].tolist()}")
    bad = np.flatnonzero(area < 0)
    if len(bad):
        raise MeshError(f"clockwise (inverted) triangle(s) {bad[:10].tolist()}")
    srt = np.sort(tri, axis=1)
    _, first, counts = np.unique(srt, axis=0, return_index=True, return_counts=True)
    if np.any(counts > 1):
        dup = np.flatnonzero(counts > 1)
        raise MeshError(f"non-conforming mesh: duplicated triangle(s) {first[dup][:10].tolist()}")
    edges = np.sort(tri[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
    _, ecount = np.unique(edges, axis=0, return_counts=True)
    if np.any(ecount > 2):
        raise MeshError("non-conforming mesh: an edge is shared by more than two triangles")
    return area


def _boundary_loop(triangles):
    oriented = triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
    key = np.sort(oriented, axis=1)
    _, inv, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    inv = inv.ravel()
    bnd = oriented[counts[inv] == 1]
    nxt = {int(a): int(b) for a, b in bnd}
    if len(nxt) != len(bnd):
        raise MeshError("boundary is not a simple polygon (pinched vertex)")
    start = int(bnd[0, 0])
    loop = [start]
    cur = nxt[start]
    while cur != start:
        loop.append(cur)
        cur = nxt[cur]
        if len(loop) > len(bnd):
            break
    if len(loop) != len(bnd):
        raise MeshError("mesh boundary has several components; a single polygon is required")
    return np.array(loop, dtype=int), bnd


def from_triangles(vertices, triangles, degree, level=0, straddling=()):
    """Generate Lagrange nodes, connectivity and the free/Dirichlet split."""
    if degree not in range(1, MAX_DEGREE + 1):
        raise MeshError(f"degree must be in 1..{MAX_DEGREE}, got {degree}")
    v = np.asarray(vertices, dtype=float)
    tri = np.asarray(triangles, dtype=int)
    check_topology(v, tri)
    d = degree
    nv, nt = len(v), len(tri)
    loop, bnd_edges = _boundary_loop(tri)

    lat = local_lattice(d)
    nloc = len(lat)
    elements = np.empty((nt, nloc), dtype=int)
    elements[:, :3] = tri

    oriented = np.stack([tri[:, list(e)] for e in LOCAL_EDGES], axis=1)  # (nt, 3, 2)
    key = np.sort(oriented, axis=2).reshape(-1, 2)
    uniq, inv = np.unique(key, axis=0, return_inverse=True)
    inv = inv.reshape(nt, 3)
    ne = len(uniq)
    per_edge = d - 1
    node_chunks = [v]
    if per_edge:
        s = np.arange(1, d) / d
        a, b = v[uniq[:, 0]], v[uniq[:, 1]]
        edge_nodes = a[:, None, :] + s[None, :, None] * (b - a)[:, None, :]
        node_chunks.append(edge_nodes.reshape(-1, 2))
        forward = oriented[:, :, 0] < oriented[:, :, 1]  # (nt, 3)
        for le in range(3):
            base = nv + inv[:, le] * per_edge
            for si in range(1, d):
                col = 3 + le * per_edge + (si - 1)
                elements[:, col] = np.where(forward[:, le], base + si - 1, base + d - si - 1)
    n_int = nloc - 3 - 3 * per_edge
    if n_int:
        start = nv + ne * per_edge
        bary = lat[3 + 3 * per_edge:] / d  # (n_int, 3)
        pts = np.einsum("ik,tkj->tij", bary, v[tri])
        node_chunks.append(pts.reshape(-1, 2))
        elements[:, 3 + 3 * per_edge:] = start + np.arange(nt * n_int).reshape(nt, n_int)
    nodes = np.concatenate(node_chunks, axis=0)

    on_bnd = np.zeros(len(nodes), dtype=bool)
    on_bnd[bnd_edges.ravel()] = True
    if per_edge:
        bkey = np.sort(bnd_edges, axis=1)
        eid = _edge_ids(uniq, bkey)
        for si in range(per_edge):
            on_bnd[nv + eid * per_edge + si] = True
    dirichlet = np.flatnonzero(on_bnd)
    free = np.flatnonzero(~on_bnd)
    return TriMesh(vertices=v, triangles=tri, degree=d, nodes=nodes, elements=elements,
                   dirichlet=dirichlet, free=free, boundary_loop=loop,
                   straddling=tuple(straddling), level=level)


def _edge_ids(uniq, query):
    lookup = {(int(a), int(b)): i for i, (a, b) in enumerate(uniq)}
    return np.array([lookup[(int(a), int(b))] for a, b in query], dtype=int)


def quadrisect(vertices, triangles):
    """Split every triangle into four through edge midpoints (orientation kept)."""
    v = np.asarray(vertices, dtype=float)
    tri = np.asarray(triangles, dtype=int)
    nv = len(v)
    edges = np.sort(tri[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
    uniq, inv = np.unique(edges, axis=0, return_inverse=True)
    mids = 0.5 * (v[uniq[:, 0]] + v[uniq[:, 1]])
    m = nv + inv.reshape(-1, 3)  # midpoints of (0,1), (1,2), (2,0)
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    m01, m12, m20 = m[:, 0], m[:, 1], m[:, 2]
    children = np.concatenate([
        np.stack([a, m01, m20], axis=1),
        np.stack([m01, b, m12], axis=1),
        np.stack([m20, m12, c], axis=1),
        np.stack([m01, m12, m20], axis=1),
    ])
    return np.concatenate([v, mids]), children


def rectangle_triangulation(rect, divisions):
    """Structured triangulation of ``rect = (x0, x1, y0, y1)`` with nx*ny squares split in two."""
    x0, x1, y0, y1 = map(float, rect)
    nx, ny = map(int, divisions)
    if x1 <= x0 or y1 <= y0 or nx < 1 or ny < 1:
        raise MeshError("invalid rectangle or divisions")
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    verts = np.stack([X.ravel(), Y.ravel()], axis=1)
    idx = np.arange((nx + 1) * (ny + 1)).reshape(ny + 1, nx + 1)
    p00 = idx[:-1, :-1].ravel()
    p10 = idx[:-1, 1:].ravel()
    p01 = idx[1:, :-1].ravel()
    p11 = idx[1:, 1:].ravel()
    tris = np.concatenate([np.stack([p00, p10, p11], axis=1),
                           np.stack([p00, p11, p01], axis=1)])
    return verts, tris


def default_divisions(rect):
    x0, x1, y0, y1 = map(float, rect)
    return max(1, int(round(x1 - x0))), max(1, int(round(y1 - y0)))


def straddling_triangles(vertices, triangles, field):
    """Triangles having interior probe points both inside and outside the heterogeneity."""
    if field is None or field.is_uniform:
        return np.empty(0, dtype=int)
    probes = np.array([(i, j, 6 - i - j) for i in range(1, 5) for j in range(1, 6 - i)]) / 6.0
    pts = np.einsum("pk,tkj->tpj", probes, vertices[triangles])
    inside = field.in_support(pts.reshape(-1, 2)).reshape(len(triangles), -1)
    return np.flatnonzero(inside.any(axis=1) & ~inside.all(axis=1))


def build_structured_mesh(rect, level, degree, hetero=None, divisions=None):
    """Structured mesh of a rectangle, quadrisected ``level`` times.

    Straddling triangles (those cut by the boundary of a heterogeneity) are
    recorded on the mesh; a warning is issued only when the support is a
    polygon, since smooth indices do not need an aligned mesh.
    """
    if degree not in range(1, MAX_DEGREE + 1):
        raise MeshError(f"degree must be in 1..{MAX_DEGREE}, got {degree}")
    if level < 0:
        raise MeshError("refinement level must be non-negative")
    divisions = divisions or default_divisions(rect)
    v, t = rectangle_triangulation(rect, divisions)
    for _ in range(level):
        v, t = quadrisect(v, t)
    strad = straddling_triangles(v, t, hetero)
    if len(strad) and hetero is not None and hetero.polygon is not None:
        warnings.warn(f"{len(strad)} triangles straddle the polygonal heterogeneity "
                      f"(first: {strad[:5].tolist()})", stacklevel=2)
    mesh = from_triangles(v, t, degree, level=level, straddling=tuple(strad.tolist()))
    logger.debug("mesh level %d degree %d: %d triangles, L=%d, M=%d",
                 level, degree, len(t), mesh.n_free, mesh.n_dirichlet)
    return mesh


# ---------------------------------------------------------------------------
# Triangle-compatible I/O
# ---------------------------------------------------------------------------

def _mesh_paths(path):
    p = Path(path)
    stem = p.with_suffix("") if p.suffix in (".node", ".ele") else p
    return stem.with_suffix(".node"), stem.with_suffix(".ele")


def save_mesh(mesh, path):
    """Write ``<stem>.node`` and ``<stem>.ele`` (0-based indices)."""
    node_path, ele_path = _mesh_paths(path)
    marker = np.zeros(len(mesh.vertices), dtype=int)
    marker[mesh.boundary_loop] = 1
    with open(node_path, "w") as fh:
        fh.write(f"{len(mesh.vertices)} 2 0 1\n")
        for i, ((x, y), m) in enumerate(zip(mesh.vertices, marker)):
            fh.write(f"{i} {float(x)!r} {float(y)!r} {int(m)}\n")
    with open(ele_path, "w") as fh:
        fh.write(f"{len(mesh.triangles)} 3 0\n")
        for i, (a, b, c) in enumerate(mesh.triangles):
            fh.write(f"{i} {a} {b} {c}\n")
    return node_path, ele_path


def _read_rows(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                rows.append(line.split())
    if not rows:
        raise MeshError(f"{path}: empty file")
    return rows


def load_mesh(path, degree=1):
    """Read a Triangle ``.node``/``.ele`` pair and rebuild degree-d nodes."""
    node_path, ele_path = _mesh_paths(path)
    try:
        nrows = _read_rows(node_path)
        erows = _read_rows(ele_path)
        nv, dim = int(nrows[0][0]), int(nrows[0][1])
        if dim != 2:
            raise MeshError(f"{node_path}: only 2-D meshes are supported")
        ids = np.array([int(r[0]) for r in nrows[1:nv + 1]])
        verts = np.array([[float(r[1]), float(r[2])] for r in nrows[1:nv + 1]])
        nt = int(erows[0][0])
        tris = np.array([[int(r[1]), int(r[2]), int(r[3])] for r in erows[1:nt + 1]])
    except (ValueError, IndexError) as exc:
        raise MeshError(f"cannot parse mesh {node_path}: {exc}") from exc
    if len(verts) != nv or len(tris) != nt:
        raise MeshError("mesh file is truncated")
    base = int(ids.min())
    if not np.array_equal(np.sort(ids), np.arange(base, base + nv)):
        raise MeshError("vertex indices are not contiguous")
    order = np.argsort(ids)
    verts = verts[order]
    tris = tris - base
    return from_triangles(verts, tris, degree)

"""Triangulations of convex polygons for piecewise-linear fields.

Two meshers are provided. The default places the polygon vertices, evenly
spaced boundary points and a hexagonal lattice of interior points, then takes
their Delaunay triangulation; for a convex point cloud whose hull is the
polygon this covers the polygon exactly. The ``"fan"`` mesher splits the
polygon into a centroid fan and refines it uniformly. It is simple but gives
slivers on polygons with many short edges.

``refine`` splits every triangle into four congruent children, so the
piecewise-linear space of the refined mesh contains that of the parent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.spatial import Delaunay

from .errors import BudgetExceeded
from .geometry import ConvexPolygon

NODE_BUDGET = 2_000_000
BOUNDARY_TOL = 1e-10

# barycentric coordinates of the four sub-triangle centroids
_QUAD_BARY = np.array([
    [2 / 3, 1 / 6, 1 / 6],
    [1 / 6, 2 / 3, 1 / 6],
    [1 / 6, 1 / 6, 2 / 3],
    [1 / 3, 1 / 3, 1 / 3],
])


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Counterclockwise triangles over ``points`` with a boundary-node mask."""

    points: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    h: float
    polygon: ConvexPolygon | None = None

    @property
    def n_nodes(self) -> int:
        return len(self.points)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @cached_property
    def interior(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary)

    @cached_property
    def areas(self) -> np.ndarray:
        a, b, c = (self.points[self.triangles[:, k]] for k in range(3))
        return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                      - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))

    @property
    def area(self) -> float:
        return float(self.areas.sum())

    @cached_property
    def max_edge(self) -> float:
        t = self.triangles
        p = self.points
        lens = [np.hypot(*(p[t[:, i]] - p[t[:, j]]).T) for i, j in ((0, 1), (1, 2), (2, 0))]
        return float(np.max(lens))

    @cached_property
    def grad_ops(self):
        """Sparse ``(Gx, Gy)`` mapping nodal values to per-triangle gradients."""
        p, t, A = self.points, self.triangles, self.areas
        x, y = p[t, 0], p[t, 1]
        # gradient of the barycentric function of vertex k
        bx = np.column_stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]]) / (2 * A[:, None])
        by = np.column_stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]]) / (2 * A[:, None])
        rows = np.repeat(np.arange(len(t)), 3)
        shape = (len(t), len(p))
        Gx = sp.csr_matrix((bx.ravel(), (rows, t.ravel())), shape=shape)
        Gy = sp.csr_matrix((by.ravel(), (rows, t.ravel())), shape=shape)
        return Gx, Gy

    @cached_property
    def quad_op(self):
        """Quadrature points and weights for ``integral |u|^q``.

        One point per sub-triangle of the midpoint subdivision. Because ``u``
        is affine on each sub-triangle and ``|.|^q`` is convex, this rule never
        exceeds the exact integral (Jensen), so Rayleigh quotients built on it
        stay above their exact values.
        """
        t = self.triangles
        nt = len(t)
        rows = np.repeat(np.arange(4 * nt), 3)
        cols = np.repeat(t, 4, axis=0).ravel()
        vals = np.tile(_QUAD_BARY, (nt, 1)).ravel()
        B = sp.csr_matrix((vals, (rows, cols)), shape=(4 * nt, len(self.points)))
        w = np.repeat(self.areas / 4.0, 4)
        return B, w

    def stiffness(self, weights=None) -> sp.csr_matrix:
        """``sum_T w_T |T| grad(phi_i) . grad(phi_j)`` as a sparse matrix."""
        Gx, Gy = self.grad_ops
        d = self.areas if weights is None else self.areas * weights
        D = sp.diags(d)
        return (Gx.T @ D @ Gx + Gy.T @ D @ Gy).tocsr()

    def mass(self) -> sp.csr_matrix:
        """Mass matrix of the quadrature rule in ``quad_op``."""
        B, w = self.quad_op
        return (B.T @ sp.diags(w) @ B).tocsr()

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "points": self.points.tolist(),
            "triangles": self.triangles.tolist(),
            "boundary": np.flatnonzero(self.boundary).tolist(),
        }


# --- meshers -------------------------------------------------------------------

def _boundary_points(P: ConvexPolygon, h: float) -> np.ndarray:
    out = []
    v = P.vertices
    for i in range(len(v)):
        a, b = v[i], v[(i + 1) % len(v)]
        m = max(1, math.ceil(np.hypot(*(b - a)) / h - 1e-9))
        s = np.arange(m)[:, None] / m
        out.append(a + s * (b - a))
    return np.vstack(out)


def _lattice_points(P: ConvexPolygon, h: float) -> np.ndarray:
    c = P.centroid
    xmin, ymin = P.vertices.min(axis=0)
    xmax, ymax = P.vertices.max(axis=0)
    dy = h * math.sqrt(3) / 2
    j = np.arange(math.floor((ymin - c[1]) / dy) - 1, math.ceil((ymax - c[1]) / dy) + 2)
    i = np.arange(math.floor((xmin - c[0]) / h) - 2, math.ceil((xmax - c[0]) / h) + 2)
    I, J = np.meshgrid(i, j)
    x = c[0] + h * (I + 0.5 * (J % 2))
    y = c[1] + dy * J
    pts = np.column_stack([x.ravel(), y.ravel()])
    keep = P.boundary_distance(pts) > 0.5 * h
    return pts[keep]


def _estimate_nodes(P: ConvexPolygon, h: float) -> float:
    return P.area / (0.866 * h * h) + P.perimeter / h


def _finish(P, pts, tris, h):
    a, b, c = pts[tris[:, 0]], pts[tris[:, 1]], pts[tris[:, 2]]
    sa = 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    flip = sa < 0
    tris = tris.copy()
    tris[flip, 1], tris[flip, 2] = tris[flip, 2], tris[flip, 1].copy()
    tris = tris[np.abs(sa) > 1e-14 * P.area]
    used = np.unique(tris)
    remap = np.full(len(pts), -1)
    remap[used] = np.arange(len(used))
    pts = pts[used]
    tris = remap[tris]
    bnd = P.boundary_distance(pts) <= BOUNDARY_TOL * P.scale
    return TriMesh(points=pts, triangles=tris, boundary=bnd, h=h, polygon=P)


def _delaunay(P: ConvexPolygon, h: float) -> TriMesh:
    pts = np.vstack([_boundary_points(P, h), _lattice_points(P, h)])
    tri = Delaunay(pts)
    if len(tri.coplanar):
        raise RuntimeError("Delaunay dropped boundary points; try another h")
    return _finish(P, pts, tri.simplices.astype(np.int64), h)


def _fan(P: ConvexPolygon, h: float) -> TriMesh:
    v = P.vertices
    k = len(v)
    pts = np.vstack([v, P.centroid])
    tris = np.array([[i, (i + 1) % k, k] for i in range(k)])
    mesh = _finish(P, pts, tris, h)
    while mesh.max_edge > h:
        if 4 * mesh.n_triangles > 2 * NODE_BUDGET:
            raise BudgetExceeded(f"fan refinement to h={h} exceeds the node budget")
        mesh = refine(mesh, h=mesh.h)
    return mesh


def triangulate(P: ConvexPolygon, h: float, method: str = "delaunay") -> TriMesh:
    """Mesh ``P`` with target edge length ``h``.

    Raises ``BudgetExceeded`` when the expected node count passes two million.
    """
    if not h > 0:
        raise ValueError("mesh size must be positive")
    if _estimate_nodes(P, h) > NODE_BUDGET:
        raise BudgetExceeded(f"h={h} needs about {_estimate_nodes(P, h):.3g} nodes")
    if method == "delaunay":
        return _delaunay(P, h)
    if method == "fan":
        return _fan(P, h)
    raise ValueError(f"unknown mesher {method!r}")


def refine(mesh: TriMesh, h: float | None = None) -> TriMesh:
    """Split each triangle at its edge midpoints into four children."""
    t = mesh.triangles
    n = mesh.n_nodes
    e = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    e.sort(axis=1)
    uniq, inv = np.unique(e, axis=0, return_inverse=True)
    inv = inv.ravel()
    mids = 0.5 * (mesh.points[uniq[:, 0]] + mesh.points[uniq[:, 1]])
    nt = len(t)
    m01, m12, m20 = (n + inv[k * nt:(k + 1) * nt] for k in range(3))
    a, b, c = t[:, 0], t[:, 1], t[:, 2]
    new = np.vstack([
        np.column_stack([a, m01, m20]),
        np.column_stack([m01, b, m12]),
        np.column_stack([m20, m12, c]),
        np.column_stack([m01, m12, m20]),
    ])
    pts = np.vstack([mesh.points, mids])
    bnd_mid = mesh.boundary[uniq[:, 0]] & mesh.boundary[uniq[:, 1]]
    if mesh.polygon is not None:
        # an edge joining two boundary nodes may be a chord across a corner
        bnd_mid &= mesh.polygon.boundary_distance(mids) <= BOUNDARY_TOL * mesh.polygon.scale
    bnd = np.concatenate([mesh.boundary, bnd_mid])
    return TriMesh(points=pts, triangles=new, boundary=bnd,
                   h=(mesh.h / 2 if h is None else h), polygon=mesh.polygon)

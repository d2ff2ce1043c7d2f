"""Convex polygon geometry and closed-form model bodies.

Polygons are handled exactly through half-plane intersection: the inner
parallel set at depth ``tau`` of a convex polygon is the intersection of its
edge half-planes shifted inward by ``tau``. Everything the inequalities need
(area, perimeter, inradius, diameter, the inner parallel profile) derives
from that single primitive.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.spatial import ConvexHull

from .errors import BorderlineExponent, InvalidExponents, InvalidPolygon
from .records import PASS, FAIL, CheckRecord, compare

EPS_CONVEX = 1e-9


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _signed_area(v):
    # centre first so tiny polygons far from the origin keep full precision
    v = v - v.mean(axis=0)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _canonical_start(v):
    # rotate so the lexicographically smallest vertex comes first; makes the
    # polygon independent of the cyclic labelling it was given with
    i = int(np.lexsort((v[:, 1], v[:, 0]))[0])
    return np.roll(v, -i, axis=0)


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Convex polygon with counterclockwise vertices.

    Construction validates convexity and orientation; use
    :meth:`from_points` to accept clockwise input or an unordered point cloud.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise InvalidPolygon("need at least 3 vertices given as (x, y) pairs")
        if not np.all(np.isfinite(v)):
            raise InvalidPolygon("non-finite vertex coordinates")
        _validate(v)
        v = _canonical_start(v)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def _unchecked(cls, v):
        obj = object.__new__(cls)
        v = _canonical_start(np.asarray(v, dtype=float))
        v.setflags(write=False)
        object.__setattr__(obj, "vertices", v)
        return obj

    @classmethod
    def from_points(cls, points, warn=True):
        """Orient ``points`` counterclockwise, reversing clockwise input."""
        v = np.asarray(points, dtype=float)
        if v.ndim == 2 and len(v) >= 3 and _signed_area(v) < 0:
            if warn:
                warnings.warn("clockwise vertex list reversed to counterclockwise",
                              stacklevel=2)
            v = v[::-1]
        return cls(v)

    @classmethod
    def hull(cls, points):
        pts = np.asarray(points, dtype=float)
        try:
            h = ConvexHull(pts)
        except Exception as exc:  # qhull raises its own error type
            raise InvalidPolygon(f"degenerate point set: {exc}") from exc
        return cls(pts[h.vertices])

    @classmethod
    def rectangle(cls, width, height=1.0):
        w, h = float(width), float(height)
        return cls([[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]])

    @classmethod
    def regular(cls, k, circumradius=1.0, center=(0.0, 0.0), phase=0.0):
        th = phase + 2 * np.pi * np.arange(k) / k
        c = np.asarray(center, dtype=float)
        return cls(c + circumradius * np.column_stack([np.cos(th), np.sin(th)]))

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"ConvexPolygon(k={len(self)}, area={self.area:.6g})"

    @cached_property
    def edges(self):
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @cached_property
    def area(self):
        return _signed_area(self.vertices)

    @cached_property
    def perimeter(self):
        return float(np.sum(np.hypot(self.edges[:, 0], self.edges[:, 1])))

    @cached_property
    def diameter(self):
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", d, d))))

    @cached_property
    def inradius(self):
        return _inradius(self)

    @cached_property
    def centroid(self):
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        c = _cross(v, w)
        return ((v + w) * c[:, None]).sum(axis=0) / (6.0 * self.area)

    @cached_property
    def halfplanes(self):
        """Inward unit normals ``n`` and offsets ``c`` with Omega = {n.x > c}."""
        e = self.edges
        ln = np.hypot(e[:, 0], e[:, 1])
        n = np.column_stack([-e[:, 1], e[:, 0]]) / ln[:, None]
        c = np.einsum("ij,ij->i", n, self.vertices)
        return n, c

    @property
    def scale(self):
        span = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return float(max(span))

    def boundary_distance(self, pts):
        """Distance to the boundary for points inside (negative outside)."""
        n, c = self.halfplanes
        return np.min(np.asarray(pts) @ n.T - c, axis=1)

    def scaled(self, t):
        return ConvexPolygon._unchecked(self.vertices * float(t))

    def translated(self, shift):
        return ConvexPolygon._unchecked(self.vertices + np.asarray(shift, dtype=float))

    def to_list(self):
        return self.vertices.tolist()


def _validate(v):
    scale = float(max(v.max(axis=0) - v.min(axis=0)))
    if scale <= 0:
        raise InvalidPolygon("all vertices coincide")
    e = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(e[:, 0], e[:, 1])
    if np.any(lengths <= 1e-12 * scale):
        raise InvalidPolygon("duplicate consecutive vertices")
    area = _signed_area(v)
    if abs(area) <= 1e-12 * scale * scale:
        raise InvalidPolygon("degenerate polygon (collinear vertices)")
    if area < 0:
        raise InvalidPolygon("vertices must be counterclockwise")
    turn = _cross(e, np.roll(e, -1, axis=0))
    if np.any(turn < -EPS_CONVEX * scale * scale):
        raise InvalidPolygon("polygon is not convex")
    # a self-intersecting star also turns left everywhere; total turning exposes it
    ang = np.arctan2(turn, np.einsum("ij,ij->i", e, np.roll(e, -1, axis=0)))
    if abs(ang.sum() - 2 * np.pi) > 1e-6:
        raise InvalidPolygon("vertex list winds more than once")


def area(P: ConvexPolygon) -> float:
    return P.area


def perimeter(P: ConvexPolygon) -> float:
    return P.perimeter


def diameter(P: ConvexPolygon) -> float:
    return P.diameter


def inradius(P: ConvexPolygon) -> float:
    return P.inradius


def _clip(poly, n, c):
    # one Sutherland-Hodgman pass against {x : n.x >= c}
    s = poly @ n - c
    inside = s >= 0
    if inside.all():
        return poly
    nxt = np.roll(poly, -1, axis=0)
    s_nxt = np.roll(s, -1)
    change = inside != np.roll(inside, -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(change, s / (s - s_nxt), 0.0)
    cross = poly + t[:, None] * (nxt - poly)
    pts = np.stack([poly, cross], axis=1).reshape(-1, 2)
    mask = np.stack([inside, change], axis=1).reshape(-1)
    return pts[mask]


def _offset_vertices(P, tau):
    n, c = P.halfplanes
    poly = P.vertices
    for k in range(len(n)):
        poly = _clip(poly, n[k], c[k] + tau)
        if len(poly) < 3:
            return None
    tol = 1e-14 * P.scale
    d = np.roll(poly, -1, axis=0) - poly
    keep = np.hypot(d[:, 0], d[:, 1]) > tol
    poly = poly[keep]
    if len(poly) < 3 or _signed_area(poly) <= 0:
        return None
    return poly


def inner_parallel(P: ConvexPolygon, tau: float):
    """Inner parallel set ``{x : dist(x, boundary) > tau}``, or ``None`` if empty."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if tau == 0:
        return P
    poly = _offset_vertices(P, float(tau))
    return None if poly is None else ConvexPolygon._unchecked(poly)


def _inradius(P, tol=None):
    # |Omega|/P < R <= 2|Omega|/P brackets the inradius of a planar convex set
    lo = P.area / P.perimeter
    hi = 2.0 * lo * (1 + 1e-12)
    while _offset_vertices(P, hi) is not None:
        hi *= 1.5
    tol = 4 * np.finfo(float).eps * hi if tol is None else tol
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _offset_vertices(P, mid) is None:
            hi = mid
        else:
            lo = mid
    return lo


@dataclass(frozen=True, eq=False)
class InnerParallelProfile:
    """Sampled area ``xi`` and perimeter ``perim`` of inner parallel sets."""

    tau: np.ndarray
    xi: np.ndarray
    perim: np.ndarray
    inradius: float

    def perimeter_at_fraction(self, s):
        """Perimeter of the inner parallel set enclosing area ``s * |Omega|``.

        For a polygon ``P(tau)^2`` is piecewise linear in ``|Omega_tau|``, so
        interpolating the square is exact between combinatorial changes.
        """
        frac = self.xi / self.xi[0]
        return np.sqrt(np.interp(s, frac[::-1], self.perim[::-1] ** 2))

    def to_csv_rows(self):
        return [{"tau": float(t), "xi": float(x), "perim": float(p)}
                for t, x, p in zip(self.tau, self.xi, self.perim)]


def parallel_profile(P: ConvexPolygon, n: int = 128, refine: bool = True) -> InnerParallelProfile:
    """Tabulate ``tau -> (|Omega_tau|, P(Omega_tau))`` on ``[0, R]``.

    The grid is uniform with ``n`` intervals; ``refine`` adds geometrically
    clustered samples just below the inradius, where the area vanishes
    quadratically.
    """
    if n < 16:
        raise ValueError("profile needs n >= 16 samples")
    R = P.inradius
    tau = np.linspace(0.0, R, n + 1)
    if refine:
        extra = R - (R / n) * 0.5 ** np.arange(1, 9)
        tau = np.unique(np.concatenate([tau, extra]))
    xi = np.empty_like(tau)
    perim = np.empty_like(tau)
    for i, t in enumerate(tau[:-1]):
        Q = inner_parallel(P, t)
        if Q is None:  # only possible within rounding of R
            xi[i], perim[i] = 0.0, np.nan
        else:
            xi[i], perim[i] = Q.area, Q.perimeter
    xi[-1] = 0.0
    # perimeter is affine in tau on the last piece, so extrapolate to tau = R
    slope = (perim[-2] - perim[-3]) / (tau[-2] - tau[-3])
    perim[-1] = min(perim[-2], max(0.0, perim[-2] + slope * (tau[-1] - tau[-2])))
    bad = np.isnan(perim)
    if bad.any():
        perim[bad] = perim[-1]
    return InnerParallelProfile(tau=tau, xi=xi, perim=perim, inradius=R)


# --- random convex polygons --------------------------------------------------

def random_convex_polygon(rng, k, radius=1.0, min_inradius=0.1):
    """Convex hull of ``k`` uniform random points on a circle.

    Draws are repeated until the inradius is at least ``min_inradius * radius``
    so that corpus members stay meshable at a fixed resolution.
    """
    while True:
        th = np.sort(rng.uniform(0.0, 2 * np.pi, size=k))
        pts = radius * np.column_stack([np.cos(th), np.sin(th)])
        try:
            P = ConvexPolygon.hull(pts)
        except InvalidPolygon:
            continue
        if P.inradius >= min_inradius * radius:
            return P


def corpus(seed: int, count: int, k=None, kmin=5, kmax=10):
    """Deterministic list of ``count`` random convex polygons.

    With ``k`` given every polygon has ``k`` vertices; otherwise the vertex
    count is drawn uniformly from ``[kmin, kmax]``.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        kk = k if k is not None else int(rng.integers(kmin, kmax + 1))
        out.append(random_convex_polygon(rng, kk))
    return out


# --- model bodies in R^N -------------------------------------------------------

def unit_ball_volume(N: int) -> float:
    return math.pi ** (N / 2) / math.gamma(N / 2 + 1)


def slab_quantities(L: float, N: int):
    """(volume, perimeter, inradius, diameter) of ``(-L/2, L/2)^(N-1) x (0, 1)``."""
    vol = L ** (N - 1)
    per = 2 * (N - 1) * L ** (N - 2) + 2 * L ** (N - 1)
    return vol, per, 0.5 * min(1.0, L), math.sqrt((N - 1) * L * L + 1.0)


def cone_quantities(alpha: float, N: int):
    """(volume, perimeter, inradius) of ``C_alpha = {|x| < 1, x_N > |x| cos(alpha)}``."""
    if not 0 < alpha < math.pi / 2:
        raise ValueError("cone opening must lie in (0, pi/2)")
    w = unit_ball_volume(N - 1)
    ca, sa = math.cos(alpha), math.sin(alpha)
    cap, _ = integrate.quad(lambda t: w * (1 - t * t) ** ((N - 1) / 2), ca, 1.0,
                            epsabs=1e-13, epsrel=1e-10)
    vol = w / N * math.tan(alpha) ** (N - 1) * ca ** N + cap
    per = N * vol + w * sa ** (N - 2)
    return vol, per, sa / (sa + 1.0)


@dataclass(frozen=True)
class ModelBody:
    """Slab box, cone or ball in dimension ``N`` with closed-form quantities."""

    kind: str
    N: int
    param: float

    @classmethod
    def slab(cls, L, N=2):
        return cls("slab_box", N, float(L))

    @classmethod
    def cone(cls, alpha, N=2):
        return cls("cone", N, float(alpha))

    @classmethod
    def ball(cls, R=1.0, N=2):
        return cls("ball", N, float(R))

    @cached_property
    def _q(self):
        if self.kind == "slab_box":
            return slab_quantities(self.param, self.N)
        if self.kind == "cone":
            vol, per, r = cone_quantities(self.param, self.N)
            return vol, per, r, max(1.0, 2 * math.sin(self.param))
        if self.kind == "ball":
            R, N = self.param, self.N
            w = unit_ball_volume(N)
            return w * R ** N, N * w * R ** (N - 1), R, 2 * R
        raise ValueError(f"unknown body kind {self.kind!r}")

    volume = property(lambda self: self._q[0])
    perimeter = property(lambda self: self._q[1])
    inradius = property(lambda self: self._q[2])
    diameter = property(lambda self: self._q[3])

    # polygon-compatible aliases
    area = volume


def _quantities(body, N):
    if isinstance(body, ConvexPolygon):
        if N != 2:
            raise ValueError("polygons live in dimension 2")
        return body.area, body.perimeter, body.inradius, body.diameter, 2
    return body.volume, body.perimeter, body.inradius, body.diameter, body.N


def _describe(body):
    if isinstance(body, ConvexPolygon):
        return {"body": "polygon", "k": len(body)}
    return {"body": body.kind, "N": body.N, "param": body.param}


# --- inradius and diameter estimates -----------------------------------------

def makai_check(body, N=2) -> CheckRecord:
    """Check ``R/N <= |Omega|/P < R``.

    The lower bound is an equality for balls and tangential polygons, so it
    is compared with a 1e-9 relative allowance.
    """
    vol, per, R, _, N = _quantities(body, N)
    mid = vol / per
    lower = R / N
    lower_ok = lower <= mid * (1 + 1e-9)
    upper_ok = mid < R
    return CheckRecord(
        name="makai", left=mid, right=R, strict=True,
        status=PASS if (lower_ok and upper_ok) else FAIL,
        inputs=_describe(body),
        provenance={"left": "exact volume/perimeter", "right": "inradius"},
        extra={"lower": lower, "lower_ok": bool(lower_ok),
               "lower_ratio": lower / mid, "ratio_vol_RP": vol / (R * per)},
    )


def gamma_N(N: int) -> float:
    return 0.5 * min(unit_ball_volume(N - 1) * 0.75 ** ((N - 1) / 2),
                     N * unit_ball_volume(N) / 2)


def diam_bound_check(body, N=2) -> CheckRecord:
    """Check ``gamma_N diam <= P / R^(N-2)`` and its volume form."""
    vol, per, R, diam, N = _quantities(body, N)
    g = gamma_N(N)
    r1 = per / R ** (N - 2)
    r2 = (per / vol ** ((N - 2) / (N - 1))) ** (N - 1)
    rec = compare("diam_bound", g * diam, min(r1, r2), strict=False,
                  inputs=_describe(body),
                  provenance={"left": "gamma_N * diameter", "right": "perimeter form"},
                  extra={"gamma_N": g, "inradius_form": r1, "volume_form": r2})
    return rec


def inradius_diam_constant(N: int, alpha: float) -> float:
    """Constant produced by the isoperimetric + inradius + diameter chain."""
    if alpha == 1:
        raise BorderlineExponent("alpha = 1 admits no diameter control")
    if alpha <= (N - 1) / N:
        raise InvalidExponents(f"need alpha > (N-1)/N = {(N - 1) / N}")
    iso = N * unit_ball_volume(N) ** (1.0 / N)
    vol_factor = iso ** ((N - 2) / (alpha - (N - 1) / N))
    g = gamma_N(N)
    if alpha < 1:
        return g * vol_factor
    return g * vol_factor * N ** (-alpha * (N - 1) / (alpha - 1))


def inradius_diam_check(body, alpha: float, N=2) -> CheckRecord:
    """Diameter control by inradius and the ratio ``P/|Omega|^alpha``.

    For ``alpha < 1`` checks
    ``C diam <= R^(a(N-1)/(1-a)) (P/|Omega|^a)^(e/(1-a))``; for ``alpha > 1``
    checks ``C diam <= R^(-a(N-1)/(a-1)) (|Omega|^a/P)^(e/(a-1))``, with
    ``e = (aN-1)/(aN-(N-1))``.
    """
    vol, per, R, diam, N = _quantities(body, N)
    a = float(alpha)
    C = inradius_diam_constant(N, a)
    e = (a * N - 1) / (a * N - (N - 1))
    if a < 1:
        right = R ** (a * (N - 1) / (1 - a)) * (per / vol ** a) ** (e / (1 - a))
        form = "good"
    else:
        right = R ** (-a * (N - 1) / (a - 1)) * (vol ** a / per) ** (e / (a - 1))
        form = "bad"
    left = C * diam
    return compare("inradius_diam", left, right, strict=False,
                   inputs={**_describe(body), "alpha": a},
                   provenance={"left": "reconstructed constant * diameter",
                               "right": "inradius/isoperimetric chain"},
                   extra={"constant": C, "form": form, "slack": right - left})

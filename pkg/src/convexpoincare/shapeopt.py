"""The scale-free functional ``F = lambda_{p,q} (|Omega|^alpha / P)^p``.

For ``q <= p`` its supremum over convex sets is approached by thinner and
thinner slabs and never attained; for ``q > p`` a maximizer exists. This
module sweeps rectangles, searches convex polygons, and compares discs with
the best rectangle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bounds import a_constant, shape_factor
from .errors import BudgetExceeded, InvalidPolygon, QNotGreaterThanP
from .geometry import ConvexPolygon
from .pde import SolverOptions, solve_lambda_pq
from .profile1d import ExponentPair


@dataclass
class ShapeFunctionalRecord:
    polygon: ConvexPolygon
    p: float
    q: float
    lam: float
    volume: float
    perimeter: float
    F: float
    h: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def bound(self) -> float:
        return a_constant(self.p, self.q)

    def as_row(self) -> dict:
        return {"p": self.p, "q": self.q, "lambda": self.lam, "volume": self.volume,
                "perimeter": self.perimeter, "F": self.F, "bound": self.bound,
                "h": self.h, "vertices": len(self.polygon)}


def _pq(pq):
    if isinstance(pq, ExponentPair):
        return pq.p, pq.q
    return float(pq[0]), float(pq[1])


def functional(P: ConvexPolygon, pq, h: float, opts: SolverOptions | None = None,
               **diag) -> ShapeFunctionalRecord:
    """Evaluate ``F`` on ``P`` with mesh size ``h``."""
    p, q = _pq(pq)
    est = solve_lambda_pq(P, (p, q), h, opts)
    F = est.value * shape_factor(P, (p, q))
    d = {"iterations": est.iterations, "spread": est.spread, "nodes": est.mesh.n_nodes}
    d.update(diag)
    return ShapeFunctionalRecord(P, p, q, est.value, P.area, P.perimeter, F, h, d)


# --- rectangles ---------------------------------------------------------------------

@dataclass
class SweepResult:
    records: list
    argmax: float
    trend: str | None
    trend_ok: bool | None
    end_drops: tuple = ()

    def rows(self):
        return [dict(L=L, **r.as_row()) for L, r in zip(self.lengths, self.records)]

    @property
    def lengths(self):
        return [r.diagnostics["L"] for r in self.records]


def rectangle_sweep(pq, L_grid, h: float = 0.05, opts: SolverOptions | None = None,
                    min_drop: float = 0.0) -> SweepResult:
    """``F`` on rectangles ``L x 1``.

    For ``q <= p`` the expected trend is strictly increasing in ``L``; for
    ``q > p`` an interior maximum, with both end values below it by more
    than ``min_drop`` (relative).
    """
    p, q = _pq(pq)
    Ls = [float(L) for L in L_grid]
    recs = [functional(ConvexPolygon.rectangle(L), (p, q), h, opts, L=L) for L in Ls]
    F = np.array([r.F for r in recs])
    i = int(np.argmax(F))
    if len(Ls) < 2:
        return SweepResult(recs, Ls[i], None, None)
    if q <= p:
        return SweepResult(recs, Ls[i], "increasing", bool(np.all(np.diff(F) > 0)))
    drops = (1 - F[0] / F[i], 1 - F[-1] / F[i])
    ok = 0 < i < len(Ls) - 1 and min(drops) > min_drop
    return SweepResult(recs, Ls[i], "interior", bool(ok), drops)


# --- polygon search -------------------------------------------------------------------

@dataclass
class ShapeOptOptions:
    max_evals: int = 150
    step0: float = 0.1
    step_min: float = 1e-4
    h_rel: float = 0.03
    n_random: int = 2
    seed: int = 0
    rect_grid: tuple = (1.0, 1.5, 2.0, 3.0, 4.0)
    rescore: bool = True
    solver: SolverOptions = field(default_factory=lambda: SolverOptions(n_starts=1, tol=1e-8, window=50))


def _radial_polygon(r, th):
    pts = np.column_stack([r * np.cos(th), r * np.sin(th)])
    return ConvexPolygon.hull(pts)


def _radial_function(P: ConvexPolygon, th):
    """Distance from the origin to the boundary of ``P`` along angles ``th``."""
    n, c = P.halfplanes  # n.x > c inside, c < 0 when the origin is interior
    u = np.column_stack([np.cos(th), np.sin(th)])
    dots = u @ n.T  # rays leave through faces with n.u < 0
    with np.errstate(divide="ignore"):
        s = np.where(dots < 0, c[None, :] / dots, np.inf)
    return s.min(axis=1)


def _repair(r, th):
    """Project radii onto the boundary of their convex hull."""
    P = _radial_polygon(r, th)
    return _radial_function(P, th), P


def _normalize(P: ConvexPolygon, pq):
    """Rescale so that ``|P|^alpha / P = 1`` (about the origin)."""
    a = ExponentPair(*_pq(pq), 2).alpha
    g = P.area ** a / P.perimeter
    # |tP|^a / P(tP) = t^(2a - 1) g
    return P.scaled(g ** (-1.0 / (2 * a - 1)))


def _better(a: ShapeFunctionalRecord, b: ShapeFunctionalRecord | None, pq):
    if b is None:
        return True
    if abs(a.F - b.F) <= 1e-6 * max(abs(b.F), 1e-300):
        return a.perimeter < b.perimeter
    return a.F > b.F


def maximize_over_polygons(pq, k: int, opts: ShapeOptOptions | None = None) -> ShapeFunctionalRecord:
    """Coordinate ascent of ``F`` over ``k``-gons with radial parameters.

    Vertices sit at equispaced angles; each step perturbs one radius and
    projects back onto the convex hull. Start shapes (regular ``k``-gon, the
    best rectangle of a short sweep, random hulls) are scored as they are, so
    the result is never worse than any start.
    """
    opts = opts or ShapeOptOptions()
    p, q = _pq(pq)
    if not q > p:
        raise QNotGreaterThanP(f"q={q} <= p={p}: the supremum is not attained")
    if k < 3:
        raise ValueError("need k >= 3")
    n_starts = 2 + opts.n_random
    if opts.max_evals < n_starts:
        raise BudgetExceeded(f"max_evals={opts.max_evals} below the {n_starts} start evaluations")
    th = 2 * np.pi * np.arange(k) / k
    rng = np.random.default_rng(opts.seed)
    evals = 0

    def score(P, **diag):
        nonlocal evals
        evals += 1
        P = _normalize(P, (p, q))
        return functional(P, (p, q), opts.h_rel * math.sqrt(P.area), opts.solver, **diag)

    # rectangle start: short sweep at the same relative resolution
    rects = [score(ConvexPolygon.rectangle(L).translated((-L / 2, -0.5)), start="rectangle", L=L)
             for L in opts.rect_grid]
    rect = max(rects, key=lambda r: r.F)
    starts = [("regular", np.ones(k)), ("rectangle", _radial_function(rect.polygon, th))]
    starts += [(f"random{i}", rng.uniform(0.5, 1.5, k)) for i in range(opts.n_random)]

    best = None
    for rec in rects:
        if _better(rec, best, (p, q)):
            best = rec
    start_scores = {"rectangle": rect.F}
    for name, r0 in starts:
        r, Ppar = _repair(r0, th)
        cur = score(Ppar, start=name)
        start_scores[name] = max(start_scores.get(name, -math.inf), cur.F)
        if _better(cur, best, (p, q)):
            best = cur
        step = opts.step0
        while step >= opts.step_min and evals < opts.max_evals:
            improved = False
            diam = Ppar.diameter
            for j in range(k):
                for sgn in (1.0, -1.0):
                    if evals >= opts.max_evals:
                        break
                    trial = r.copy()
                    trial[j] = max(trial[j] + sgn * step * diam, 1e-3 * r.mean())
                    try:
                        tr, P = _repair(trial, th)
                    except InvalidPolygon:
                        continue
                    rec = score(P, start=name)
                    if rec.F > cur.F:
                        r, Ppar, cur, improved = tr, P, rec, True
                        break
            if not improved:
                step /= 2
        if _better(cur, best, (p, q)):
            best = cur
        if evals >= opts.max_evals:
            break

    best.diagnostics.update(evaluations=evals, start_scores=start_scores, k=k, seed=opts.seed)
    if opts.rescore:
        fine = replace(opts.solver, n_starts=SolverOptions().n_starts, tol=1e-9, window=100)
        h2 = best.h / 2
        best.diagnostics["F_fine"] = functional(best.polygon, (p, q), h2, fine).F
        best.diagnostics["rectangle_F_fine"] = functional(rect.polygon, (p, q), h2, fine).F
        best.diagnostics["ranking_confirmed"] = best.diagnostics["F_fine"] >= best.diagnostics["rectangle_F_fine"] - 1e-3
    return best


# --- discs against rectangles ------------------------------------------------------

@dataclass
class CrossoverTable:
    rows: list
    crossover_q: float | None


def ball_vs_rectangle(p: float, q_grid, h: float = 0.05, L_grid=(1, 1.5, 2, 3, 5, 10, 20),
                      opts: SolverOptions | None = None, disk_vertices: int = 64) -> CrossoverTable:
    """Compare ``F`` of a disc polygon with the best rectangle for each ``q``."""
    disk = ConvexPolygon.regular(disk_vertices)
    rows = []
    cross = None
    for q in q_grid:
        Fd = functional(disk, (p, q), h, opts).F
        sw = rectangle_sweep((p, q), L_grid, h, opts)
        Fr = max(r.F for r in sw.records)
        wins = Fr > Fd
        rows.append({"p": p, "q": float(q), "F_disk": Fd, "F_rect_max": Fr,
                     "L_argmax": sw.argmax, "rectangle_wins": wins})
        if wins and cross is None:
            cross = float(q)
    return CrossoverTable(rows, cross)

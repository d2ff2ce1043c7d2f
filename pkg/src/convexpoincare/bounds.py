"""Inequality checks built on the solvers.

Finite-element values of ``lambda`` are upper bounds for the true constant.
Checks of the form ``lambda < bound`` are therefore conservative: a pass on
the mesh implies a pass in the continuum. Checks of the form
``bound < lambda`` are not, and use Richardson extrapolation over nested
meshes before passing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .geometry import ConvexPolygon, inner_parallel
from .mesh import refine, triangulate
from .pde import SolverOptions, polya_upper_bound, solve_lambda_pq
from .profile1d import ExponentPair, pi_pq_power
from .records import FAIL, INCONCLUSIVE, PASS, CheckRecord, compare


def _pair(pq) -> ExponentPair:
    if isinstance(pq, ExponentPair):
        return pq.in_dim(2)
    return ExponentPair(float(pq[0]), float(pq[1]), 2)


def a_constant(p: float, q: float) -> float:
    """``(pi_{p,q} / 2)^p`` from the 1-D solver."""
    return pi_pq_power(p, q) / 2.0 ** p


def polya_rhs(volume: float, perimeter: float, pq) -> float:
    """``(pi_{p,q}/2)^p (P / |Omega|^alpha)^p`` in the plane."""
    pair = _pair(pq)
    return a_constant(pair.p, pair.q) * (perimeter / volume ** pair.alpha) ** pair.p


def polya_check(P: ConvexPolygon, pq, h: float, opts: SolverOptions | None = None,
                with_coarea: bool = False, label: str = "") -> CheckRecord:
    """``lambda_{p,q}(P) < (pi_{p,q}/2)^p (P/|P|^alpha)^p`` with FEM ``lambda``."""
    pair = _pair(pq)
    est = solve_lambda_pq(P, (pair.p, pair.q), h, opts)
    rhs = polya_rhs(P.area, P.perimeter, pair)
    extra = {"iterations": est.iterations, "spread": est.spread, "nodes": est.mesh.n_nodes}
    if with_coarea:
        extra["coarea_bound"] = polya_upper_bound(P, (pair.p, pair.q))
    return compare("polya", est.value, rhs, strict=True,
                   inputs={"polygon": label, "p": pair.p, "q": pair.q, "h": h},
                   provenance={"left": "fem upper bound", "right": "1-d solver constant"},
                   extra=extra)


# --- Cheeger constant -------------------------------------------------------------

@dataclass(frozen=True)
class CheegerResult:
    """``h1 = 1/t`` and the Cheeger set ``Omega_t + B_t`` of a convex polygon."""

    h1: float
    t: float
    set_area: float
    set_perimeter: float


def _inner_area(P, t):
    Q = inner_parallel(P, t)
    return 0.0 if Q is None else Q.area


def _rounded_ratio(P, t):
    """``P/|E|`` for ``E = Omega_t + B_t``; the perimeter-to-area ratio."""
    Q = inner_parallel(P, t)
    if Q is None:
        return math.inf
    area = Q.area + Q.perimeter * t + math.pi * t * t
    return (Q.perimeter + 2 * math.pi * t) / area


def cheeger_convex_2d(P: ConvexPolygon, tol: float = 1e-12) -> CheegerResult:
    """Cheeger constant of a planar convex set.

    The Cheeger set is the union of discs of radius ``t`` inside ``P``, where
    ``t`` solves ``|Omega_t| = pi t^2``; then ``h1 = 1/t``.
    """
    R = P.inradius
    t = brentq(lambda s: _inner_area(P, s) - math.pi * s * s, 0.0, R, xtol=tol, rtol=1e-15)
    Q = inner_parallel(P, t)
    A = Q.area if Q is not None else 0.0
    L = Q.perimeter if Q is not None else 0.0
    return CheegerResult(h1=1.0 / t, t=t, set_area=A + L * t + math.pi * t * t,
                         set_perimeter=L + 2 * math.pi * t)


def cheeger_cross_check(P: ConvexPolygon, n_grid: int = 200) -> float:
    """Minimize ``P(E)/|E|`` over rounded inner bodies ``Omega_t + B_t``.

    Independent of the root-finding characterization; returns the minimum.
    """
    R = P.inradius
    ts = np.linspace(0.0, R, n_grid + 1)[1:-1]
    vals = np.array([_rounded_ratio(P, t) for t in ts])
    i = int(np.argmin(vals))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, len(ts) - 1)]
    res = minimize_scalar(lambda t: _rounded_ratio(P, t), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12})
    return float(min(res.fun, vals[i]))


# --- Buser and Cheeger inequalities ------------------------------------------------

def buser_check(P: ConvexPolygon, p: float, h: float, opts: SolverOptions | None = None,
                max_refine: int = 2, label: str = "") -> CheckRecord:
    """``lambda_p(P) < (pi_p/2)^p h1^p``; a failure is re-tested on refined meshes."""
    ch = cheeger_convex_2d(P)
    rhs = a_constant(p, p) * ch.h1 ** p
    mesh = triangulate(P, h)
    for level in range(max_refine + 1):
        est = solve_lambda_pq(P, (p, p), opts=opts, mesh=mesh)
        rec = compare("buser", est.value, rhs, strict=True,
                      inputs={"polygon": label, "p": p, "q": p, "h": h},
                      provenance={"left": "fem upper bound", "right": "1-d constant x cheeger"},
                      extra={"h1": ch.h1, "refinements": level, "nodes": mesh.n_nodes})
        if rec.passed:
            break
        mesh = refine(mesh)
    return rec


def cheeger_lower_check(P: ConvexPolygon, h: float, opts: SolverOptions | None = None,
                        max_refine: int = 2, label: str = "") -> CheckRecord:
    """``h1^2/4 < lambda_2(P)`` against an extrapolated lower estimate.

    With ``l1, l2`` the values on meshes ``h`` and ``h/2`` the extrapolant is
    ``(4 l2 - l1)/3``; its distance to ``l2`` is used as a safety margin. The
    check passes only if ``h1^2/4`` lies below the extrapolant minus that
    margin, fails if it exceeds a mesh value (which bounds ``lambda`` from
    above), and is otherwise inconclusive.
    """
    ch = cheeger_convex_2d(P)
    left = 0.25 * ch.h1 ** 2
    mesh = triangulate(P, h)
    l1 = solve_lambda_pq(P, (2, 2), opts=opts, mesh=mesh).value
    status = INCONCLUSIVE
    for level in range(max_refine + 1):
        mesh = refine(mesh)
        l2 = solve_lambda_pq(P, (2, 2), opts=opts, mesh=mesh).value
        ex = (4 * l2 - l1) / 3
        margin = abs(l2 - ex)
        lower = ex - margin
        if left < lower:
            status = PASS
        elif left >= l2:
            status = FAIL
        if status != INCONCLUSIVE:
            break
        l1 = l2
    return CheckRecord(name="cheeger_lower", left=left, right=lower, strict=True, status=status,
                       inputs={"polygon": label, "p": 2, "q": 2, "h": h},
                       provenance={"left": "cheeger constant", "right": "richardson extrapolant minus margin"},
                       extra={"h1": ch.h1, "lambda_fine": l2, "extrapolated": ex,
                              "margin": margin, "refinements": level + 1})


# --- monotonicity in q ---------------------------------------------------------------

def shape_factor(P: ConvexPolygon, pq) -> float:
    """``(|P|^alpha / P)^p``, the normalization making ``lambda`` scale free."""
    pair = _pair(pq)
    return (P.area ** pair.alpha / P.perimeter) ** pair.p


def monotonicity_scan(P: ConvexPolygon, p: float, q_grid, h: float,
                      opts: SolverOptions | None = None, rtol: float = 0.01,
                      label: str = "") -> list[CheckRecord]:
    """Check that ``q -> lambda_{p,q} (|P|^alpha/P)^p`` does not increase."""
    qs = [float(q) for q in q_grid]
    if not qs:
        raise ValueError("empty q grid")
    if any(b <= a for a, b in zip(qs, qs[1:])):
        raise ValueError("q grid must be strictly ascending")
    mesh = triangulate(P, h)
    F = [solve_lambda_pq(P, (p, q), opts=opts, mesh=mesh).value * shape_factor(P, (p, q))
         for q in qs]
    if len(qs) == 1:
        return [compare("monotonicity", F[0], F[0], strict=False,
                        inputs={"polygon": label, "p": p, "q": qs[0], "h": h})]
    return [compare("monotonicity", F[i + 1], F[i], strict=False, rtol=rtol,
                    inputs={"polygon": label, "p": p, "q_from": qs[i], "q_to": qs[i + 1], "h": h},
                    provenance={"left": "scaled fem value at q_to", "right": "scaled fem value at q_from"})
            for i in range(len(qs) - 1)]

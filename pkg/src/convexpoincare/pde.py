"""Poincare-Sobolev constants of convex polygons.

``lambda_{p,q}`` is approximated by minimizing the Rayleigh quotient

    R(u) = sum_T |grad u|_T|^p |T|  /  (sum_k w_k |u(x_k)|^q)^(p/q)

over continuous piecewise-linear ``u`` vanishing on the boundary. The
denominator uses the sub-triangle centroid rule of ``TriMesh.quad_op``, which
under-integrates ``|u|^q``; every discrete value is therefore an upper bound
for the continuous constant, and minimizing over a refined mesh can only
lower it.

The minimizer is found by preconditioned descent on the quotient. Each step
solves one linear system with the lagged-weight p-Laplace stiffness matrix
(a Kacanov linearization), so for ``p = 2`` a unit step is exactly one
inverse-iteration step. An Armijo search on the true quotient keeps the
iteration monotone. ``p = q = 2`` is a symmetric generalized eigenproblem and
goes straight to ARPACK.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh, splu

from .errors import ConvergenceFailure, DegenerateField, InvalidExponents, ProfileTooCoarse
from .geometry import ConvexPolygon, parallel_profile
from .mesh import TriMesh, triangulate
from .profile1d import ExponentPair, a_pq_solution


@dataclass(frozen=True, eq=False)
class MeshField:
    """Nodal values of a piecewise-linear field; zero on boundary nodes."""

    mesh: TriMesh
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.mesh.n_nodes,):
            raise ValueError("one value per mesh node expected")
        if np.any(v[self.mesh.boundary] != 0.0):
            raise ValueError("field must vanish on boundary nodes")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, mesh: TriMesh, f) -> "MeshField":
        v = np.asarray(f(mesh.points[:, 0], mesh.points[:, 1]), dtype=float).copy()
        v[mesh.boundary] = 0.0
        return cls(mesh, v)

    def to_csv_rows(self):
        return [{"x": float(x), "y": float(y), "u": float(u)}
                for (x, y), u in zip(self.mesh.points, self.values)]


@dataclass
class EigEstimate:
    """Discrete minimum of the Rayleigh quotient; an upper bound for ``lambda``."""

    value: float
    field: MeshField
    h: float
    p: float
    q: float
    iterations: int = 0
    starts: list = field(default_factory=list)
    spread: float = 0.0
    flagged: bool = False
    method: str = "descent"

    @property
    def mesh(self) -> TriMesh:
        return self.field.mesh

    def as_dict(self) -> dict:
        return {
            "value": self.value, "h": self.h, "p": self.p, "q": self.q,
            "nodes": self.mesh.n_nodes, "iterations": self.iterations,
            "starts": list(self.starts), "spread": self.spread,
            "flagged": self.flagged, "method": self.method, "bound": "upper",
        }


@dataclass
class SolverOptions:
    max_iter: int = 5000
    tol: float = 1e-9
    window: int = 100
    min_iter: int = 10
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    initial_step: float = 1.0
    max_expand: int = 4
    conjugate: bool = True
    clamp_every: int = 50
    n_starts: int = 6
    spread_flag: float = 5e-3
    seed: int = 0
    eps_rel: float = 1e-4
    use_eigsh: bool = True


# --- discrete quotient ------------------------------------------------------------

class _Problem:
    """Quotient restricted to interior nodes, with cached operators."""

    def __init__(self, mesh: TriMesh, p: float, q: float):
        self.mesh, self.p, self.q = mesh, float(p), float(q)
        self.inf = math.isinf(q)
        I = mesh.interior
        self.I = I
        Gx, Gy = mesh.grad_ops
        self.Gx, self.Gy = Gx[:, I].tocsr(), Gy[:, I].tocsr()
        self.a = mesh.areas
        B, w = mesh.quad_op
        self.B, self.w = B[:, I].tocsr(), w
        self._K0 = None

    @property
    def K0(self):
        if self._K0 is None:
            self._K0 = (self.Gx.T @ sp.diags(self.a) @ self.Gx
                        + self.Gy.T @ sp.diags(self.a) @ self.Gy).tocsc()
        return self._K0

    def parts(self, u):
        gx, gy = self.Gx @ u, self.Gy @ u
        gn = np.hypot(gx, gy)
        E = float(np.sum(self.a * gn ** self.p))
        if self.inf:
            Q = float(np.max(np.abs(u)))
        else:
            Q = float(np.sum(self.w * np.abs(self.B @ u) ** self.q))
        return E, Q, gx, gy, gn

    def value(self, u):
        E, Q, *_ = self.parts(u)
        return self._ratio(E, Q)

    def _ratio(self, E, Q):
        if Q <= 0:
            return math.inf
        return E / Q ** self.p if self.inf else E / Q ** (self.p / self.q)

    def normalize(self, u):
        n = np.max(np.abs(u)) if self.inf else np.sum(self.w * np.abs(self.B @ u) ** self.q) ** (1 / self.q)
        return u / n

    def residual(self, u):
        """Return ``(R, r, s)`` with ``grad R = s * r`` and ``r = K_w u - (E/Q) F``."""
        p = self.p
        E, Q, gx, gy, gn = self.parts(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            wt = np.where(gn > 0, gn ** (p - 2), 0.0) * self.a
        Ku = self.Gx.T @ (wt * gx) + self.Gy.T @ (wt * gy)
        if self.inf:
            k = int(np.argmax(np.abs(u)))
            F = np.zeros_like(u)
            F[k] = math.copysign(1.0, u[k])
            r = Ku - (E / Q) * F
            s = p / Q ** p
        else:
            z = self.B @ u
            F = self.B.T @ (self.w * np.sign(z) * np.abs(z) ** (self.q - 1))
            r = Ku - (E / Q) * F
            s = p / Q ** (p / self.q)
        return self._ratio(E, Q), r, s, gn

    def preconditioner(self, gn, eps_rel):
        if self.p == 2.0:
            return self.K0
        eps = eps_rel * max(float(np.max(gn)), 1e-300)
        wt = self.a * (gn ** 2 + eps ** 2) ** ((self.p - 2) / 2)
        D = sp.diags(wt)
        return (self.Gx.T @ D @ self.Gx + self.Gy.T @ D @ self.Gy).tocsc()


def rayleigh_2d(u: MeshField, pq) -> float:
    """Discrete quotient ``||grad u||_p^p / ||u||_q^p`` of a mesh field."""
    p, q = _pq(pq)
    if not np.any(u.values):
        raise DegenerateField("zero field")
    prob = _Problem(u.mesh, p, q)
    return prob.value(u.values[prob.I])


def _pq(pq):
    if isinstance(pq, ExponentPair):
        return pq.p, pq.q
    return float(pq[0]), float(pq[1])


# --- solver -------------------------------------------------------------------------

def _line_search(prob, u, R, d, slope, opts):
    """Armijo backtracking from ``initial_step``; doubles while still improving."""
    t = opts.initial_step
    while True:
        cand = prob.normalize(u + t * d)
        Rc = prob.value(cand)
        if Rc <= R + opts.armijo_c * t * slope:
            break
        t *= opts.backtrack
        if t < 1e-14:
            return u, R, 0.0
    if t == opts.initial_step:
        for _ in range(opts.max_expand):
            c2 = prob.normalize(u + 2 * t * d)
            R2 = prob.value(c2)
            if not R2 < Rc:
                break
            cand, Rc, t = c2, R2, 2 * t
    return cand, Rc, t


def _descend(prob: _Problem, u0, opts: SolverOptions):
    u = prob.normalize(u0)
    R, r, s, gn = prob.residual(u)
    lu = splu(prob.K0) if prob.p == 2.0 else None
    trace = [R]
    it = 0
    d_prev = z_prev = r_prev = None
    for it in range(1, opts.max_iter + 1):
        solve = lu.solve if lu is not None else splu(prob.preconditioner(gn, opts.eps_rel)).solve
        z = solve(r)
        d = -z
        if opts.conjugate and d_prev is not None:
            # Polak-Ribiere with automatic restart
            beta = max(0.0, float(z @ (r - r_prev)) / float(z_prev @ r_prev))
            d = d + beta * d_prev
        slope = s * float(r @ d)
        if not slope < 0:
            d = -z
            slope = s * float(r @ d)
            if not slope < 0:
                break
        u, Rc, t = _line_search(prob, u, R, d, slope, opts)
        d_prev, z_prev, r_prev = d, z, r
        if opts.clamp_every and it % opts.clamp_every == 0:
            v = np.maximum(u if np.sum(u) >= 0 else -u, 0.0)
            if np.any(v):
                v = prob.normalize(v)
                Rv = prob.value(v)
                if Rv <= Rc:
                    u, Rc = v, Rv
                    d_prev = None
        R, r, s, gn = prob.residual(u)
        trace.append(R)
        m = min(opts.window, it)
        if it >= opts.min_iter and trace[-1 - m] - R <= opts.tol * R:
            return u, R, it, trace, True
        if t == 0.0:
            return u, R, it, trace, True
    return u, R, it, trace, False


def _eigsh(prob: _Problem):
    K = prob.K0
    M = (prob.B.T @ sp.diags(prob.w) @ prob.B).tocsc()
    # fixed start vector: ARPACK otherwise draws a random one
    v0 = _boundary_start(prob.mesh)[prob.I] + 1e-3
    vals, vecs = eigsh(K, k=1, M=M, sigma=0.0, which="LM", v0=v0)
    u = vecs[:, 0]
    if u.sum() < 0:
        u = -u
    return prob.normalize(u), float(vals[0])


def _boundary_start(mesh: TriMesh):
    if mesh.polygon is None:
        raise ValueError("mesh without polygon needs an explicit start")
    d = mesh.polygon.boundary_distance(mesh.points)
    return np.maximum(d, 0.0)


def _bump_start(mesh: TriMesh, rng):
    base = _boundary_start(mesh)
    c = mesh.points[rng.integers(len(mesh.points))]
    while base[np.argmin(np.hypot(*(mesh.points - c).T))] == 0:
        c = mesh.points[rng.integers(len(mesh.points))]
    span = mesh.polygon.diameter if mesh.polygon is not None else 1.0
    s = span * rng.uniform(0.1, 0.5)
    r2 = np.sum((mesh.points - c) ** 2, axis=1)
    return base * np.exp(-r2 / (2 * s * s))


def _full(mesh, prob, u):
    v = np.zeros(mesh.n_nodes)
    v[prob.I] = u
    return v


def _run_single(prob, start, opts):
    u, R, it, trace, ok = _descend(prob, start, opts)
    return u, R, it, ok


def solve_lambda_pq(P: ConvexPolygon | None, pq, h: float | None = None,
                    opts: SolverOptions | None = None, mesh: TriMesh | None = None,
                    start: np.ndarray | None = None) -> EigEstimate:
    """Upper estimate of ``lambda_{p,q}(P)`` on a mesh of size ``h``.

    Pass ``mesh`` to reuse a triangulation (for nested refinements); ``start``
    optionally supplies nodal values of an initial guess.
    """
    opts = opts or SolverOptions()
    p, q = _pq(pq)
    pair = ExponentPair(p, q, 2)
    if math.isinf(q) and not p > 2:
        raise InvalidExponents("q = inf needs p > 2 in the plane")
    pair.require_valid()
    if mesh is None:
        if P is None or h is None:
            raise ValueError("give a polygon and h, or a mesh")
        mesh = triangulate(P, h)
    prob = _Problem(mesh, p, q)
    if len(prob.I) == 0:
        raise ValueError("mesh has no interior nodes; decrease h")

    if p == 2.0 and q == 2.0 and opts.use_eigsh and start is None:
        u, R = _eigsh(prob)
        return EigEstimate(R, MeshField(mesh, _full(mesh, prob, u)), mesh.h, p, q,
                           iterations=0, starts=[R], method="eigsh")

    base = _boundary_start(mesh)[prob.I] if start is None else np.asarray(start, float)[prob.I]
    starts = [base]
    if q > p and start is None and opts.n_starts > 1:
        inner = solve_lambda_pq(None, (p, p), opts=replace(opts, n_starts=1), mesh=mesh)
        starts = [inner.field.values[prob.I]]
        rng = np.random.default_rng(opts.seed)
        starts += [_bump_start(mesh, rng)[prob.I] for _ in range(opts.n_starts - 1)]

    best = None
    values, total = [], 0
    for s0 in starts:
        u, R, it, ok = _run_single(prob, s0, opts)
        total += it
        values.append(R)
        if best is None or R < best[1]:
            best = (u, R, ok)
    u, R, ok = best
    if np.sum(u) < 0:
        u = -u
    est = EigEstimate(R, MeshField(mesh, _full(mesh, prob, u)), mesh.h, p, q,
                      iterations=total, starts=values)
    if len(values) > 1:
        est.spread = (max(values) - min(values)) / min(values)
        est.flagged = est.spread > opts.spread_flag
    if not ok:
        raise ConvergenceFailure(f"no convergence in {opts.max_iter} iterations", best=est)
    return est


# --- interior-parallels upper bound ----------------------------------------------

def polya_upper_bound(P: ConvexPolygon, pq, n_tau: int = 256, n_1d: int = 2000) -> float:
    """Quotient of the test function ``psi(|Omega_delta| / |Omega|)``.

    ``psi`` is the one-sided 1-D minimizer and ``delta`` the distance to the
    boundary. By the coarea formula the quotient reduces to one-dimensional
    integrals in the area fraction ``s = |Omega_tau| / |Omega|``:

        |Omega|^(1-p) int |psi'(s)|^p P(s)^p ds / (|Omega| int |psi|^q ds)^(p/q)
    """
    p, q = _pq(pq)
    prof = parallel_profile(P, n_tau)
    if np.any(np.diff(prof.xi) >= 0) or np.any(np.diff(prof.perim) > 0):
        raise ProfileTooCoarse("inner parallel tables are not monotone")
    sol = a_pq_solution(p, q, n_1d)
    psi = sol.profile.values
    n = len(psi) - 1
    ds = 1.0 / n
    s_mid = (np.arange(n) + 0.5) * ds
    per = prof.perimeter_at_fraction(s_mid)
    A = P.area
    num = A ** (1 - p) * np.sum(np.abs(np.diff(psi) / ds) ** p * per ** p) * ds
    if math.isinf(q):
        den = np.max(np.abs(psi)) ** p
    else:
        w = np.full(n + 1, ds)
        w[[0, -1]] = ds / 2
        den = (A * np.sum(w * np.abs(psi) ** q)) ** (p / q)
    return float(num / den)


def right_continuity_scan(P: ConvexPolygon, p: float, q_grid, h: float,
                          opts: SolverOptions | None = None):
    """Estimates of ``lambda_{p,q}`` along ``q_grid`` on one shared mesh."""
    mesh = triangulate(P, h)
    return [solve_lambda_pq(P, (p, q), opts=opts, mesh=mesh) for q in q_grid]

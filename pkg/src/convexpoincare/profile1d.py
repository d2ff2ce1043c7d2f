"""One-dimensional Poincare constants on (0, 1).

``pi_{p,q}`` minimizes ``||u'||_p / ||u||_q`` over functions vanishing at
both ends; ``A_{p,q}`` is the same problem with a single zero end. Both are
computed on a uniform grid with piecewise-linear functions, forward
differences on cells and trapezoid weights for the ``L^q`` norm.

The minimizer is found by projected descent on the sphere ``||u||_q = 1``.
The descent direction comes from one exact discrete inverse step: solve the
discrete p-Laplace equation with right-hand side ``|u|^(q-2) u``, which in
one dimension reduces to a scalar root find. An Armijo line search along that
direction guarantees monotone decrease of the discrete Rayleigh quotient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceFailure, DegenerateProfile, InvalidExponents

BOTH = "both_ends_zero"
RIGHT = "right_end_zero"
P_MIN = 1.05


@dataclass(frozen=True)
class ExponentPair:
    """Exponents ``(p, q)`` read in dimension ``N``; ``q`` may be ``math.inf``."""

    p: float
    q: float
    N: int = 2

    def __post_init__(self):
        if not self.p > 1:
            raise InvalidExponents(f"p must exceed 1, got {self.p}")
        if not self.q >= 1:
            raise InvalidExponents(f"q must be at least 1, got {self.q}")

    @property
    def inv_q(self):
        return 0.0 if math.isinf(self.q) else 1.0 / self.q

    @property
    def alpha(self):
        return 1.0 - 1.0 / self.p + self.inv_q

    @property
    def p_star(self):
        return self.N * self.p / (self.N - self.p) if self.p < self.N else math.inf

    @property
    def valid(self):
        if self.p <= self.N:
            return self.q < self.p_star
        return True

    @property
    def regime(self):
        if self.q < self.p:
            return "q<p"
        if self.q == self.p:
            return "q=p"
        return "q>p"

    def require_valid(self):
        if not self.valid:
            raise InvalidExponents(
                f"q={self.q} not admissible for p={self.p} in dimension {self.N} "
                f"(need q < p* = {self.p_star})")
        return self

    def in_dim(self, N):
        return ExponentPair(self.p, self.q, N)


@dataclass(frozen=True, eq=False)
class DiscreteProfile:
    """Nodal values on the uniform grid ``t_i = i/n`` of ``[0, 1]``."""

    values: np.ndarray
    bc: str = BOTH

    def __post_init__(self):
        u = np.array(self.values, dtype=float)
        if u.ndim != 1 or len(u) < 3:
            raise ValueError("profile needs at least 3 nodes")
        if self.bc not in (BOTH, RIGHT):
            raise ValueError(f"unknown boundary tag {self.bc!r}")
        if u[-1] != 0 or (self.bc == BOTH and u[0] != 0):
            raise ValueError("boundary values must be exactly zero")
        u.setflags(write=False)
        object.__setattr__(self, "values", u)

    @classmethod
    def from_function(cls, f, n, bc=BOTH):
        t = np.linspace(0.0, 1.0, n + 1)
        u = np.asarray(f(t), dtype=float).copy()
        u[-1] = 0.0
        if bc == BOTH:
            u[0] = 0.0
        return cls(u, bc)

    @property
    def n(self):
        return len(self.values) - 1

    @property
    def t(self):
        return np.linspace(0.0, 1.0, self.n + 1)

    def to_csv_rows(self):
        return [{"t": float(a), "u": float(b)} for a, b in zip(self.t, self.values)]


def _weights(n):
    w = np.full(n + 1, 1.0 / n)
    w[0] = w[-1] = 0.5 / n
    return w


def _parts(u, p, q, w):
    n = len(u) - 1
    d = np.diff(u) * n
    E = float(np.sum(np.abs(d) ** p)) / n
    if math.isinf(q):
        Q = float(np.max(np.abs(u)))
    else:
        Q = float(np.dot(w, np.abs(u) ** q)) ** (1.0 / q)
    return E, Q


def rayleigh_1d(u: DiscreteProfile, pq: ExponentPair) -> float:
    """Discrete ``||u'||_p^p / ||u||_q^p`` (denominator ``max|u|^p`` for q = inf)."""
    vals = u.values if isinstance(u, DiscreteProfile) else np.asarray(u, dtype=float)
    E, Q = _parts(vals, pq.p, pq.q, _weights(len(vals) - 1))
    if Q == 0:
        raise DegenerateProfile("profile is identically zero")
    return E / Q ** pq.p


def rearrange(u: DiscreteProfile) -> DiscreteProfile:
    """Discrete symmetric decreasing rearrangement of ``|u|``.

    For ``both_ends_zero`` profiles the interior values are sorted and laid
    out alternately around the midpoint, so that
    ``u*(1/2 + kh) >= u*(1/2 - kh) >= u*(1/2 + (k+1)h)``. The interior nodes
    carry equal trapezoid weights, hence every discrete ``L^q`` norm is
    preserved exactly. For ``right_end_zero`` profiles the values are sorted
    decreasingly from ``t = 0``.
    """
    v = np.abs(u.values)
    out = np.zeros_like(v)
    if u.bc == RIGHT:
        out[:-1] = np.sort(v[:-1])[::-1]
        return DiscreteProfile(out, RIGHT)
    inner = np.sort(v[1:-1])[::-1]
    m = len(inner)
    c = m // 2
    k = np.arange(m)
    if m % 2:
        # centre, right, left, right, ...
        slots = np.where(k % 2 == 1, c + (k + 1) // 2, c - (k + 1) // 2)
    else:
        # two central nodes: left-centre, right-centre, then alternate outward
        slots = np.where(k % 2 == 1, c + (k - 1) // 2, c - 1 - k // 2)
    out[1:-1][slots] = inner
    return DiscreteProfile(out, BOTH)


@dataclass
class SolverOptions:
    """Knobs for the 1-D descent. Defaults follow the documented design."""

    max_iter: int = 100_000
    tol: float = 1e-10
    window: int = 50
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    initial_step: float = 1.0
    polish_every: int = 25
    n_random_starts: int = 8
    seed: int = 0
    spread_flag: float = 1e-3


@dataclass
class Solve1DResult:
    value: float
    profile: DiscreteProfile
    iterations: int
    trace: list = field(default_factory=list)
    starts: list = field(default_factory=list)
    spread: float = 0.0
    flagged: bool = False


def _phi(x, r):
    # |x|^(r-2) x, written to stay finite at x = 0 for 1 < r < 2
    return np.sign(x) * np.abs(x) ** (r - 1.0)


def _load(u, q, w):
    if math.isinf(q):
        f = np.zeros_like(u)
        a = np.abs(u)
        idx = np.flatnonzero(a >= a.max() * (1 - 1e-14))
        f[idx] = np.sign(u[idx]) / len(idx)
        return f
    return w * _phi(u, q)


def _inverse_step(u, p, q, w, bc):
    """Exact solution of the discrete p-Laplace problem with load ``|u|^(q-2)u``."""
    n = len(u) - 1
    h = 1.0 / n
    f = _load(u, q, w)
    pc = p / (p - 1.0)
    v = np.zeros_like(u)
    if bc == RIGHT:
        # natural condition at t = 0 fixes the flux on every cell
        s = -np.cumsum(f[:-1])
        e = _phi(s, pc)
        v[:-1] = -h * np.cumsum(e[::-1])[::-1]
        return v
    F = np.concatenate([[0.0], np.cumsum(f[1:-1])])  # F_j for cells j = 0..n-1

    def g(c):
        return float(np.sum(_phi(c - F, pc)))

    lo, hi = float(F.min()), float(F.max())
    if hi <= lo:
        return v
    c = brentq(g, lo, hi, xtol=1e-15 * max(abs(lo), abs(hi)), rtol=4 * np.finfo(float).eps,
               maxiter=200)
    e = _phi(c - F, pc)
    v[1:] = h * np.cumsum(e)
    v[-1] = 0.0
    return v


def _gradient(u, p, q, w):
    """Gradient of the discrete Rayleigh quotient with respect to nodal values."""
    n = len(u) - 1
    d = np.diff(u) * n
    E, Q = _parts(u, p, q, w)
    fl = _phi(d, p)
    gE = np.zeros_like(u)
    gE[:-1] -= p * fl
    gE[1:] += p * fl
    if math.isinf(q):
        gQ = _load(u, q, w) * 1.0
        dQ = gQ  # subgradient of max|u|
    else:
        dQ = w * _phi(u, q) * Q ** (1.0 - q)
    return gE / Q ** p - p * E / Q ** (p + 1) * dQ


def _normalize(u, q, w):
    Q = float(np.max(np.abs(u))) if math.isinf(q) else float(np.dot(w, np.abs(u) ** q)) ** (1.0 / q)
    return u / Q if Q > 0 else u


def _mask_bc(g, bc):
    g = g.copy()
    g[-1] = 0.0
    if bc == BOTH:
        g[0] = 0.0
    return g


def _descend(u0, pq, bc, opts, polish=True):
    p, q = pq.p, pq.q
    n = len(u0) - 1
    w = _weights(n)
    u = np.abs(u0)
    u[-1] = 0.0
    if bc == BOTH:
        u[0] = 0.0
    u = _normalize(u, q, w)
    R = rayleigh_1d(u, pq)
    trace = [R]
    best_u, best_R = u, R
    for it in range(1, opts.max_iter + 1):
        v = _inverse_step(u, p, q, w, bc)
        v = _normalize(v, q, w)
        d = v - u
        g = _mask_bc(_gradient(u, p, q, w), bc)
        slope = float(np.dot(g, d))
        if not slope < 0:
            d = -g * (np.linalg.norm(u) / max(np.linalg.norm(g), 1e-300))
            slope = float(np.dot(g, d))
        step = opts.initial_step
        accepted = False
        while step > 1e-12:
            cand = np.abs(u + step * d)
            cand = _normalize(cand, q, w)
            Rc = rayleigh_1d(cand, pq)
            if Rc <= R + opts.armijo_c * step * slope:
                accepted = True
                break
            step *= opts.backtrack
        if accepted:
            u, R = cand, Rc
        if polish and opts.polish_every and it % opts.polish_every == 0:
            r = rearrange(DiscreteProfile(u, bc)).values
            r = _normalize(r, q, w)
            Rr = rayleigh_1d(r, pq)
            if Rr <= R:
                u, R = r, Rr
        trace.append(R)
        if R < best_R:
            best_u, best_R = u, R
        if not accepted and it > 1:
            return best_u, best_R, it, trace
        if it >= opts.window:
            old = trace[-1 - opts.window]
            if abs(old - R) <= opts.tol * abs(R):
                return best_u, best_R, it, trace
    raise ConvergenceFailure(f"no convergence in {opts.max_iter} iterations",
                             best=(best_u, best_R))


def _random_start(rng, n, bc):
    t = np.linspace(0.0, 1.0, n + 1)
    u = np.zeros(n + 1)
    for k in range(1, 6):
        u += rng.normal() / k * np.sin(k * np.pi * t / (2 if bc == RIGHT else 1) + (
            np.pi / 2 if bc == RIGHT else 0.0))
    u = np.abs(u) + 0.1 * rng.uniform(size=n + 1)
    u[-1] = 0.0
    if bc == BOTH:
        u[0] = 0.0
    return u


def _smooth_start(n, bc):
    t = np.linspace(0.0, 1.0, n + 1)
    return np.cos(np.pi * t / 2) if bc == RIGHT else np.sin(np.pi * t)


def _solve(pq, n, bc, opts):
    if pq.p < P_MIN:
        raise InvalidExponents(f"p must be at least {P_MIN} for the 1-D solver")
    if n < 3:
        raise ValueError("grid too small")
    opts = opts or SolverOptions()
    starts = [_smooth_start(n, bc)]
    if pq.q > pq.p:
        ref = ExponentPair(pq.p, pq.p, pq.N)
        u_pp, _, _, _ = _descend(_smooth_start(n, bc), ref, bc, opts)
        rng = np.random.default_rng(opts.seed)
        starts = [u_pp] + [_random_start(rng, n, bc) for _ in range(opts.n_random_starts)]
    results = []
    for s in starts:
        results.append(_descend(s, pq, bc, opts))
    vals = [r[1] for r in results]
    k = int(np.argmin(vals))
    u, R, it, trace = results[k]
    spread = (max(vals) - min(vals)) / min(vals)
    u = u.copy()
    u[-1] = 0.0
    if bc == BOTH:
        u[0] = 0.0
    return Solve1DResult(value=R, profile=DiscreteProfile(u, bc), iterations=it, trace=trace,
                         starts=vals, spread=spread, flagged=spread > opts.spread_flag)


def _as_1d(pq):
    if isinstance(pq, tuple):
        pq = ExponentPair(*pq, N=1)
    return pq


def solve_pi_pq(pq, n: int = 2000, opts: SolverOptions | None = None) -> Solve1DResult:
    """Estimate ``pi_{p,q}^p`` with the minimizing both-ends-zero profile."""
    if n < 200:
        raise ValueError("use at least n = 200 grid cells")
    return _solve(_as_1d(pq), n, BOTH, opts)


def solve_a_pq(pq, n: int = 2000, opts: SolverOptions | None = None) -> Solve1DResult:
    """Estimate ``A_{p,q}`` (zero only at t = 1) with its minimizer."""
    if n < 200:
        raise ValueError("use at least n = 200 grid cells")
    return _solve(_as_1d(pq), n, RIGHT, opts)


@lru_cache(maxsize=None)
def _cached_pi(p, q, n):
    return solve_pi_pq(ExponentPair(p, q, 1), n).value


@lru_cache(maxsize=None)
def _cached_a(p, q, n):
    return solve_a_pq(ExponentPair(p, q, 1), n)


def pi_pq_power(p: float, q: float, n: int = 2000) -> float:
    """Cached ``pi_{p,q}^p``."""
    return _cached_pi(float(p), float(q), int(n))


def a_pq_solution(p: float, q: float, n: int = 2000) -> Solve1DResult:
    """Cached ``A_{p,q}`` solve (value and decreasing minimizer)."""
    return _cached_a(float(p), float(q), int(n))


def closed_form_pi_p1(p: float) -> float:
    return 2.0 * ((2 * p - 1) / (p - 1)) ** ((p - 1) / p)


def closed_form_extremal_p1(p: float, n: int) -> DiscreteProfile:
    r = p / (p - 1)
    return DiscreteProfile.from_function(lambda t: 0.5 ** r - np.abs(t - 0.5) ** r, n)


def scaled_min(L: float, pq, value: float | None = None) -> float:
    """Minimum of the 1-D quotient on ``(0, L)``: ``pi_{p,q}^p / L^(p-1+p/q)``."""
    pq = _as_1d(pq)
    if value is None:
        value = pi_pq_power(pq.p, pq.q)
    return value / L ** (pq.p - 1 + pq.p * pq.inv_q)


def pi_p1_table(ps):
    return [{"p": float(p), "pi_p1": closed_form_pi_p1(p),
             "pi_p1_pow_p": closed_form_pi_p1(p) ** p} for p in ps]

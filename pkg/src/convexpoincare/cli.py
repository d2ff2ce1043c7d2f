"""Command-line entry point: ``convexpoincare <command> ...``.

Exit codes: 0 success, 1 a check failed, 2 usage or input error, 3 numerical
failure (no convergence or an undecidable check).
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .bounds import (buser_check, cheeger_convex_2d, cheeger_lower_check, monotonicity_scan,
                     polya_check, polya_rhs)
from .errors import (BorderlineExponent, BudgetExceeded, ConvergenceFailure, Inconclusive,
                     InvalidExponents, InvalidPolygon, QNotGreaterThanP)
from .geometry import ConvexPolygon, corpus, diam_bound_check, inradius_diam_check, makai_check
from .pde import SolverOptions, polya_upper_bound, solve_lambda_pq
from .profile1d import ExponentPair, closed_form_pi_p1, solve_a_pq, solve_pi_pq
from .records import FAIL, INCONCLUSIVE
from .shapeopt import ShapeOptOptions, ball_vs_rectangle, maximize_over_polygons, rectangle_sweep

OUT_ENV = "CONVEXPOINCARE_OUT"
ALL_CHECKS = ("polya", "buser", "cheeger", "monotonicity", "makai", "diam", "inradius_diam")
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --- argument parsing helpers -----------------------------------------------------

def _q(text: str) -> float:
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def _pairs(text: str):
    out = []
    for chunk in text.split(";"):
        if chunk.strip():
            p, q = chunk.split(",")
            out.append((float(p), _q(q)))
    return out


def _floats(text: str):
    return [float(x) for x in text.split(",") if x.strip()]


def _lengths(text: str):
    """``a:b`` gives the 1-2-5 sequence inside ``[a, b]`` plus both ends."""
    if ":" not in text:
        return _floats(text)
    a, b = (float(x) for x in text.split(":"))
    if not 0 < a <= b:
        raise UsageError(f"bad length range {text!r}")
    vals = {a, b}
    for e in range(math.floor(math.log10(a)) - 1, math.ceil(math.log10(b)) + 1):
        for m in (1, 2, 5):
            v = m * 10.0 ** e
            if a <= v <= b:
                vals.add(v)
    return sorted(vals)


def _shape(text: str) -> ConvexPolygon:
    """``square``, ``disk[:k]``, ``rect:L``, ``regular:k`` or a JSON file path."""
    name, _, arg = text.partition(":")
    if name == "square":
        return ConvexPolygon.rectangle(1.0)
    if name == "disk":
        return ConvexPolygon.regular(int(arg or 128))
    if name == "rect":
        return ConvexPolygon.rectangle(float(arg))
    if name == "regular":
        return ConvexPolygon.regular(int(arg))
    return io.load_polygon(text)


def _outdir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or "out")


def _config(args) -> dict:
    skip = {"func", "out", "jobs"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, name: str, text: str):
    path = io.write_text(_outdir(args) / name, text)
    print(f"wrote {path}")


def _pmap(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# --- commands -------------------------------------------------------------------------

def cmd_pi1d(args) -> int:
    pq = ExponentPair(args.p, args.q, 1)
    pi = solve_pi_pq(pq, n=args.n)
    a = solve_a_pq(pq, n=args.n)
    rec = {"p": args.p, "q": args.q, "n": args.n, "pi_pq_power": pi.value,
           "pi_pq": pi.value ** (1 / args.p), "A_pq": a.value,
           "A_from_pi": (pi.value ** (1 / args.p) / 2) ** args.p,
           "iterations": pi.iterations, "spread": pi.spread}
    if args.q == 1:
        rec["closed_form_pi_pq_power"] = closed_form_pi_p1(args.p) ** args.p
    if args.p == 2 and args.q == 2:
        rec["closed_form_pi_pq_power"] = math.pi ** 2
    if "closed_form_pi_pq_power" in rec:
        rec["relative_error"] = abs(pi.value / rec["closed_form_pi_pq_power"] - 1)
    print(io.dumps(rec), end="")
    if args.out or os.environ.get(OUT_ENV):
        _emit(args, f"pi1d_p{args.p}_q{args.q}.json", io.dumps({"config": _config(args), "result": rec}))
        _emit(args, f"pi1d_p{args.p}_q{args.q}_profile.csv",
              io.csv_text(pi.profile.to_csv_rows(), _config(args)))
    return EXIT_OK


def cmd_eig(args) -> int:
    P = _shape(args.polygon)
    opts = SolverOptions(seed=args.seed)
    est = solve_lambda_pq(P, (args.p, args.q), args.h, opts)
    rec = {"polygon": args.polygon, "area": P.area, "perimeter": P.perimeter, **est.as_dict()}
    if not math.isinf(args.q):
        rec["polya_rhs"] = polya_rhs(P.area, P.perimeter, (args.p, args.q))
        if args.polya:
            rec["coarea_bound"] = polya_upper_bound(P, (args.p, args.q))
    print(io.dumps(rec), end="")
    if args.out or os.environ.get(OUT_ENV):
        stem = f"eig_p{args.p}_q{args.q}_h{args.h}"
        _emit(args, stem + ".json", io.dumps({"config": _config(args), "result": rec}))
        _emit(args, stem + "_field.csv", io.csv_text(est.field.to_csv_rows(), _config(args)))
        _emit(args, stem + "_mesh.json", io.dumps(est.mesh.to_dict()))
    return EXIT_OK


def _check_one(task):
    """All requested checks on one corpus polygon; returns rows in a fixed order."""
    label, verts, cfg = task
    P = ConvexPolygon(np.asarray(verts))
    h, checks = cfg["h"], cfg["checks"]
    opts = SolverOptions(seed=cfg["seed"])
    recs = []
    if "polya" in checks:
        recs += [polya_check(P, pq, h, opts, label=label) for pq in cfg["pairs"]]
    if "buser" in checks:
        recs += [buser_check(P, p, h, opts, label=label) for p in cfg["ps"]]
    if "cheeger" in checks:
        recs.append(cheeger_lower_check(P, h, opts, label=label))
    if "monotonicity" in checks:
        recs += monotonicity_scan(P, 2.0, cfg["mono_q"], h, opts, label=label)
    if "makai" in checks:
        recs.append(makai_check(P))
    if "diam" in checks:
        recs.append(diam_bound_check(P))
    if "inradius_diam" in checks:
        recs += [inradius_diam_check(P, a) for a in cfg["alphas"]]
    rows = []
    for r in recs:
        row = {"polygon": label, "name": r.name, "left": r.left, "right": r.right,
               "ratio": r.ratio, "strict": r.strict, "status": r.status,
               "inputs": r.inputs, "provenance": r.provenance, "extra": r.extra}
        rows.append(row)
    return rows


def run_corpus_checks(seed: int, count: int, checks, h: float, pairs, ps, jobs: int = 1,
                      mono_q=(1.0, 1.5, 2.0, 3.0, 4.0), alphas=(0.75, 1.5)):
    cfg = {"h": h, "checks": list(checks), "pairs": [list(x) for x in pairs], "ps": list(ps),
           "seed": seed, "mono_q": list(mono_q), "alphas": list(alphas)}
    polys = corpus(seed, count)
    tasks = [(f"s{seed}-{i:03d}", P.to_list(), cfg) for i, P in enumerate(polys)]
    return [row for rows in _pmap(_check_one, tasks, jobs) for row in rows]


COLUMNS = ["polygon", "name", "left", "right", "ratio", "strict", "status",
           "inputs", "provenance", "extra"]


def cmd_check(args) -> int:
    checks = [c for c in (args.checks or "").split(",") if c]
    if not checks:
        raise UsageError("empty checks list")
    if "all" in checks:
        checks = list(ALL_CHECKS)
    bad = set(checks) - set(ALL_CHECKS)
    if bad:
        raise UsageError(f"unknown checks: {sorted(bad)}")
    rows = run_corpus_checks(args.seed, args.count, checks, args.h, _pairs(args.pairs),
                             _floats(args.ps), args.jobs)
    _emit(args, f"checks_seed{args.seed}_n{args.count}.csv", io.csv_text(rows, _config(args), COLUMNS))
    n_fail = sum(r["status"] == FAIL for r in rows)
    n_inc = sum(r["status"] == INCONCLUSIVE for r in rows)
    print(f"{len(rows)} records, {n_fail} failed, {n_inc} inconclusive")
    if n_fail:
        return EXIT_FAIL
    if n_inc:
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_sweep(args) -> int:
    Ls = _lengths(args.L)
    opts = SolverOptions(seed=args.seed)
    sw = rectangle_sweep((args.p, args.q), Ls, args.h, opts)
    rows = sw.rows()
    cfg = _config(args)
    stem = f"sweep_p{args.p}_q{args.q}"
    _emit(args, stem + ".csv", io.csv_text(rows, cfg, ["L", "F", "lambda", "bound", "h"]))
    bound = rows[0]["bound"]
    _emit(args, stem + ".svg", io.svg_plot([("rectangles", Ls, [r["F"] for r in rows])], cfg,
                                           "L", "F", f"p={args.p}, q={args.q}", logx=True,
                                           hline=bound))
    print(f"argmax L = {sw.argmax}, trend {sw.trend}: {'ok' if sw.trend_ok in (True, None) else 'violated'}")
    return EXIT_OK if sw.trend_ok in (True, None) else EXIT_FAIL


def cmd_shapeopt(args) -> int:
    opts = ShapeOptOptions(max_evals=args.max_evals, seed=args.seed)
    best = maximize_over_polygons((args.p, args.q), args.k, opts)
    cfg = _config(args)
    rec = {**best.as_row(), "diagnostics": best.diagnostics, "vertices": best.polygon.to_list()}
    stem = f"shapeopt_p{args.p}_q{args.q}_k{args.k}_seed{args.seed}"
    _emit(args, stem + ".json", io.dumps({"config": cfg, "result": rec}))
    _emit(args, stem + "_polygon.json", io.polygon_to_json(best.polygon, F=best.F))
    _emit(args, stem + ".svg", io.svg_polygons([("best", best.polygon)], cfg, f"F = {best.F:.6f}"))
    print(f"best F = {best.F!r} (bound {best.bound!r})")
    return EXIT_OK if best.F < best.bound else EXIT_FAIL


def cmd_crossover(args) -> int:
    qs = _floats(args.q_grid)
    tab = ball_vs_rectangle(args.p, qs, args.h, _lengths(args.L), SolverOptions(seed=args.seed))
    cfg = _config(args)
    stem = f"crossover_p{args.p}"
    _emit(args, stem + ".csv", io.csv_text(tab.rows, cfg))
    _emit(args, stem + ".svg", io.svg_plot(
        [("disk", qs, [r["F_disk"] for r in tab.rows]),
         ("best rectangle", qs, [r["F_rect_max"] for r in tab.rows])], cfg, "q", "F"))
    print(f"smallest sampled q with a winning rectangle: {tab.crossover_q}")
    return EXIT_OK


# --- parser -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="convexpoincare",
                                 description="Poincare-Sobolev constants of convex sets.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./out)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")

    sp = sub.add_parser("pi1d", help="one-dimensional constants")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=_q, required=True)
    sp.add_argument("--n", type=int, default=2000)
    common(sp)
    sp.set_defaults(func=cmd_pi1d)

    sp = sub.add_parser("eig", help="lambda_{p,q} of one polygon")
    sp.add_argument("--polygon", required=True,
                    help="square | disk[:k] | rect:L | regular:k | path to JSON")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=_q, required=True)
    sp.add_argument("--h", type=float, default=0.05)
    sp.add_argument("--polya", action="store_true", help="also evaluate the coarea test bound")
    common(sp)
    sp.set_defaults(func=cmd_eig)

    sp = sub.add_parser("check", help="inequality checks on a random corpus")
    sp.add_argument("--corpus", dest="seed_alias", type=int, default=None,
                    help="alias for --seed")
    sp.add_argument("--count", type=int, default=50)
    sp.add_argument("--checks", default="all",
                    help="comma list from " + ",".join(ALL_CHECKS) + " or 'all'")
    sp.add_argument("--pairs", default="2,2;3,2;2,3;1.5,1")
    sp.add_argument("--ps", default="1.5,2,3")
    sp.add_argument("--h", type=float, default=0.05)
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("sweep", help="F on rectangles L x 1")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=_q, required=True)
    sp.add_argument("--L", default="1:50")
    sp.add_argument("--h", type=float, default=0.05)
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("shapeopt", help="maximize F over k-gons (q > p)")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=_q, required=True)
    sp.add_argument("--k", type=int, default=12)
    sp.add_argument("--max-evals", type=int, default=150)
    common(sp)
    sp.set_defaults(func=cmd_shapeopt)

    sp = sub.add_parser("crossover", help="disk against the best rectangle near q = p")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--q-grid", default="2.05,2.1,2.25,2.5,3,4,8")
    sp.add_argument("--L", default="1,1.5,2,3,5,10,20")
    sp.add_argument("--h", type=float, default=0.1)
    common(sp)
    sp.set_defaults(func=cmd_crossover)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "seed_alias", None) is not None:
        args.seed = args.seed_alias
    if hasattr(args, "seed_alias"):
        del args.seed_alias
    try:
        return args.func(args)
    except (UsageError, InvalidExponents, BorderlineExponent, QNotGreaterThanP,
            InvalidPolygon, BudgetExceeded, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceFailure, Inconclusive) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

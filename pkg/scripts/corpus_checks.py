"""Run every inequality check on a seeded random corpus and write a CSV."""
import argparse
import time

from convexpoincare import io
from convexpoincare.cli import ALL_CHECKS, COLUMNS, run_corpus_checks


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--h", type=float, default=0.05)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="out/corpus_checks.csv")
    args = ap.parse_args()
    pairs = [(2, 2), (3, 2), (2, 3), (1.5, 1)]
    t = time.perf_counter()
    rows = run_corpus_checks(args.seed, args.count, ALL_CHECKS, args.h, pairs, (1.5, 2, 3), args.jobs)
    io.write_text(args.out, io.csv_text(rows, vars(args), COLUMNS))
    by_name = {}
    for r in rows:
        s = by_name.setdefault(r["name"], {"n": 0, "bad": 0, "max_ratio": 0.0})
        s["n"] += 1
        s["bad"] += r["status"] != "pass"
        s["max_ratio"] = max(s["max_ratio"], r["ratio"])
    for name, s in sorted(by_name.items()):
        print(f"{name:16s} {s['n']:5d} records  {s['bad']:3d} not passing  max ratio {s['max_ratio']:.4f}")
    print(f"{time.perf_counter() - t:.0f}s, wrote {args.out}")


if __name__ == "__main__":
    main()

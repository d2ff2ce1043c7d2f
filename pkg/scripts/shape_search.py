"""Maximize F over k-gons for q > p and compare with rectangles and discs."""
import argparse

from convexpoincare import io
from convexpoincare.shapeopt import ShapeOptOptions, maximize_over_polygons


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--q", type=float, default=4.0)
    ap.add_argument("--ks", default="6,8,12")
    ap.add_argument("--max-evals", type=int, default=150)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()
    shapes = []
    for k in map(int, args.ks.split(",")):
        best = maximize_over_polygons((args.p, args.q), k, ShapeOptOptions(max_evals=args.max_evals))
        d = best.diagnostics
        print(f"k={k:3d}  F={best.F:.5f}  fine={d.get('F_fine', float('nan')):.5f}  "
              f"rectangle fine={d.get('rectangle_F_fine', float('nan')):.5f}  bound={best.bound:.5f}")
        shapes.append((f"k={k}", best.polygon))
        io.write_text(f"{args.out}/shape_k{k}.json", io.polygon_to_json(best.polygon, F=best.F))
    io.write_text(f"{args.out}/shapes.svg", io.svg_polygons(shapes, vars(args), "best polygons"))


if __name__ == "__main__":
    main()

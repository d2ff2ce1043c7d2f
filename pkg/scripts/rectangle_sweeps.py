"""F on rectangles L x 1 for q <= p (saturation) and q > p (interior maximum)."""
import argparse

from convexpoincare import io
from convexpoincare.shapeopt import rectangle_sweep

LS = [1, 1.5, 2, 3, 5, 10, 20, 50]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, default=0.1)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()
    series, rows = [], []
    for pq in [(2, 2), (2, 1.5), (2, 2.25), (2, 3), (2, 4)]:
        sw = rectangle_sweep(pq, LS, h=args.h)
        F = [r.F for r in sw.records]
        series.append((f"p={pq[0]}, q={pq[1]}", LS, F))
        rows += [dict(p=pq[0], q=pq[1], L=L, F=f) for L, f in zip(LS, F)]
        print(f"{pq}: argmax L = {sw.argmax}, trend {sw.trend} ok={sw.trend_ok}, "
              + " ".join(f"{f:.4f}" for f in F))
    cfg = {"h": args.h, "L": LS}
    io.write_text(f"{args.out}/rectangle_sweeps.csv", io.csv_text(rows, cfg))
    io.write_text(f"{args.out}/rectangle_sweeps.svg",
                  io.svg_plot(series, cfg, "L", "F", "rectangles L x 1", logx=True))


if __name__ == "__main__":
    main()

"""Disk polygon against the best rectangle as q moves away from p = 2."""
import argparse

from convexpoincare import io
from convexpoincare.shapeopt import ball_vs_rectangle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, default=0.1)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()
    qs = [2.05, 2.1, 2.25, 2.5, 3, 4]
    tab = ball_vs_rectangle(2, qs, h=args.h)
    for r in tab.rows:
        print(f"q={r['q']:5.2f}  disk {r['F_disk']:.4f}  rectangle {r['F_rect_max']:.4f} (L={r['L_argmax']})")
    print("first sampled q with a winning rectangle:", tab.crossover_q)
    cfg = {"p": 2, "h": args.h, "q": qs}
    io.write_text(f"{args.out}/crossover.csv", io.csv_text(tab.rows, cfg))


if __name__ == "__main__":
    main()

"""Table of one-dimensional constants against their closed forms."""
import math

from convexpoincare.profile1d import ExponentPair, closed_form_pi_p1, pi_p1_table, solve_a_pq, solve_pi_pq


def main():
    print(f"{'p':>5} {'q':>5} {'pi^p':>12} {'A':>12} {'(pi/2)^p':>12} {'closed form':>12}")
    for p, q in [(2, 2), (2, 1), (3, 1), (1.5, 1), (1.5, 1.5), (2, 3), (3, 2), (2, 4), (3, math.inf)]:
        pair = ExponentPair(p, q, 1)
        pi = solve_pi_pq(pair).value
        a = solve_a_pq(pair).value
        cf = closed_form_pi_p1(p) ** p if q == 1 else (math.pi ** 2 if (p, q) == (2, 2) else float("nan"))
        print(f"{p:5.2f} {q:5.2f} {pi:12.6f} {a:12.6f} {pi / 2 ** p:12.6f} {cf:12.6f}")
    for row in pi_p1_table([1.1, 1.5, 2, 3, 5, 10, 100]):
        print(f"p={row['p']:6.1f}  pi_p1={row['pi_p1']:.6f}")


if __name__ == "__main__":
    main()

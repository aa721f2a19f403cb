"""Constants of both dyadic sums as tau grows, for each (n, theta).

Shows how far past 2^20 the constants keep moving: n = 3 settles near 2^30,
n = 4 is still creeping up at 2^40, and the second sum for n = 5, 6 decays.

    python3 scripts/dyadic_flatness.py [max_exponent]
"""
import sys

from cgolab.stat_lab import dyadic

CASES = [(3, 0.0), (4, 0.0), (5, 0.9), (6, 0.9)]


def main(top=40):
    exps = list(range(6, top + 1, 2))
    print("n  theta  sum   " + " ".join(f"2^{e:<5d}" for e in exps))
    for n, th in CASES:
        a, b = dyadic.default_alphas(n, th)
        rows = [dyadic.sum_constants(n, th, 2.0**e, a, b)[:2] for e in exps]
        for j, label in enumerate(("leq", "geq")):
            vals = " ".join(f"{r[j]:<7.4f}" for r in rows)
            print(f"{n}  {th:<5g}  {label}   {vals}")
        print(f"   fitted alpha (leq) at tau = 2^{top}: {dyadic.fitted_alpha(n, th, 2.0**top):.4f}"
              f"  (claimed {a:.4f})")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 40)

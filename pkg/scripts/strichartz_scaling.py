"""Maximised band ratio ||Q_lam f||_6 / ||f||_{X^{1/2}} over lam and tau (n = 3, N = 64).

    python3 scripts/strichartz_scaling.py
"""
import numpy as np

from cgolab import make_grid
from cgolab.phase import GENERIC_TAU_FACTOR, PhaseVector
from cgolab.stat_lab import sample_haar
from cgolab.stat_lab.strichartz import strichartz_band_fit, strichartz_constant


def main():
    grid = make_grid(3, 64, 2 * np.pi)
    U = sample_haar(3, np.random.default_rng(11)).U
    for tau, lams in ((8, [1]), (16, [1, 2]), (32, [1, 2, 4])):
        z = PhaseVector.from_frame(tau * GENERIC_TAU_FACTOR, U)
        if len(lams) == 1:
            c = strichartz_constant(z, 1, 2, np.random.default_rng(0), grid)
            print(f"tau {tau:>2}: lam 1 ratio {c.value:.4f} constant {c.extra['constant']:.4f}")
            continue
        r = strichartz_band_fit(z, lams, 2, np.random.default_rng(0), grid)
        consts = ", ".join(f"lam {lam}: {r.extra[f'constant_lam{lam}']:.4f}" for lam in lams)
        print(f"tau {tau:>2}: lam-exponent {r.value:.3f}; constants {consts}")


if __name__ == "__main__":
    main()

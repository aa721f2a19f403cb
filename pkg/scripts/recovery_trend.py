"""Median Fourier-coefficient error against tau for one bump conductivity.

    python3 scripts/recovery_trend.py [samples]
"""
import sys
import time

import numpy as np

from cgolab import make_conductivity, make_grid, parse_conductivity, recover_fourier, schrodinger_potential
from cgolab.phase import GENERIC_TAU_FACTOR
from cgolab.rng import stream
from cgolab.stat_lab import sample_haar

TAUS = [6, 8, 12, 16, 24, 32]
K = np.array([1.0, 2.0, 2.0])


def main(samples=4):
    grid = make_grid(3, 64, 2 * np.pi)
    q = schrodinger_potential(make_conductivity(parse_conductivity("bumps: 0 0 0 0.1 0.45"), grid)).q
    print(f"k = {K}, {samples} Haar frames per tau")
    print("tau   median|err|   median|linear|  median|bilinear|  |qhat|      seconds")
    prev = None
    for tau in TAUS:
        t0 = time.time()
        rng = stream(0, "trend", tau)
        rs = [recover_fourier(q, K, tau * GENERIC_TAU_FACTOR, sample_haar(3, rng)) for _ in range(samples)]
        err = np.median([abs(r.error) for r in rs])
        lin = np.median([abs(r.linear) for r in rs])
        bil = np.median([abs(r.bilinear) for r in rs])
        note = "" if prev is None else f"  x{prev / err:.2f}"
        print(f"{tau:<5d} {err:.3e}     {lin:.3e}       {bil:.3e}         {abs(rs[0].qhat_true):.3e}"
              f"  {time.time() - t0:5.1f}{note}")
        prev = err


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 4)

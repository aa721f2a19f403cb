"""The twelve acceptance criteria at their stated tolerances.

Each test records one PASS/FAIL line (printed in the terminal summary and to
stdout) before asserting.  Criteria 8-10 share one set of N = 64 solves.
"""
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from cgolab import cgo, fields
from cgolab.cgo import carleman_ratio, conjugation_defect, solve_cgo, verify_residual
from cgolab.phase import GENERIC_TAU_FACTOR, PhaseVector
from cgolab.recovery import alessandrini_gap, gradient_identity_check, recover_fourier
from cgolab.spaces import x_norm
from cgolab.spectral import Field, SpectralField, forward_transform, inverse_transform
from cgolab.stat_lab import averaging, dyadic, haar, strichartz

from conftest import VERDICTS

ROOT = Path(__file__).resolve().parents[1]

pytestmark = pytest.mark.slow


def verdict(num, ok, detail):
    line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    VERDICTS[num] = line
    print(line)
    assert ok, line


def zeta_for(tau, rng, n=3):
    return PhaseVector.from_frame(tau * GENERIC_TAU_FACTOR, haar.sample_haar(n, rng).U)


def test_c01_carleman_isometry(grid32):
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(5):
        z = zeta_for(rng.uniform(2, 8), rng)
        for _ in range(20):
            g = inverse_transform(fields.random_field(grid32, rng))
            worst = max(worst, abs(carleman_ratio(g, z) - 1))
    verdict(1, worst <= 1e-10, f"max |ratio - 1| = {worst:.2e} over 100 fields, 5 zetas (tol 1e-10)")


def test_c02_conjugation(grid32):
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(20):
        z = zeta_for(rng.uniform(2, 8), rng)
        worst = max(worst, conjugation_defect(fields.real_random_field(grid32, rng), z))
    verdict(2, worst <= 1e-11, f"max relative defect = {worst:.2e} on 20 fields (tol 1e-11)")


def test_c03_strichartz_band_scaling(grid64):
    U = haar.sample_haar(3, np.random.default_rng(11)).U
    out = {}
    for tau, lams in ((16, (1, 2)), (32, (1, 2, 4))):
        z = PhaseVector.from_frame(tau * GENERIC_TAU_FACTOR, U)
        out[tau] = strichartz.strichartz_band_fit(z, list(lams), 2, np.random.default_rng(0), grid64)
    slope = out[32].value
    ratios = [out[32].extra[f"constant_lam{lam}"] / out[16].extra[f"constant_lam{lam}"] for lam in (1, 2)]
    ok = abs(slope - 1 / 3) <= 0.15 and all(abs(r - 1) <= 0.25 for r in ratios)
    verdict(3, ok, f"lam-exponent {slope:.3f} (1/3 +- 0.15); constant ratio tau 32/16 = "
                   f"{', '.join(f'{r:.3f}' for r in ratios)} (within 25%)")


DYADIC_CASES = [(3, 0.0), (4, 0.0), (5, 0.9), (6, 0.9)]
DYADIC_TAUS = [2.0**e for e in range(6, 21)]


def test_c04_dyadic_sums():
    """Flat constants over tau in [2^6, 2^20] plus the alpha slope fits.

    The flatness half is expected to fail on this range; see the notes in the
    README.  The assertion is left at the stated 5% on purpose.
    """
    variations = {}
    for n, th in DYADIC_CASES:
        s, p = dyadic.exponent_pair(n, th)
        r = dyadic.verify_dyadic_sums(n, s, p, th, DYADIC_TAUS)
        variations[(n, th)] = (r.extra["leq_variation"], r.extra["geq_variation"])
    a3 = dyadic.fitted_alpha(3, 0.0, 2.0**20)
    a4 = dyadic.fitted_alpha(4, 0.0, 2.0**20)
    alpha_ok = abs(a3 - 2 / 3) <= 0.05 and abs(a4 - 3 / 4) <= 0.05
    flat_ok = all(max(v) < 0.05 for v in variations.values())
    detail = "; ".join(f"n={n}: var leq {v[0]:.1%} geq {v[1]:.1%}" for (n, _), v in variations.items())
    verdict(4, alpha_ok and flat_ok, f"alpha fits {a3:.3f} (2/3), {a4:.3f} (3/4); {detail} (need < 5%)")


def test_c05_haar():
    rng = np.random.default_rng(105)
    m, n = 10_000, 3
    acc = np.zeros((n, n))
    dots = np.empty(m)
    for i in range(m):
        U = haar.sample_haar(n, rng).U
        acc += np.outer(U[:, 0], U[:, 0])
        dots[i] = U[:, 1] @ np.array([0.6, 0.0, 0.8])
    dev = np.max(np.abs(acc / m - np.eye(n) / n))
    pval = stats.kstest(dots, lambda t: haar.sphere_marginal_cdf(t, n)).pvalue
    verdict(5, dev <= 5 / np.sqrt(m) and pval > 0.01,
            f"second-moment deviation {dev:.4f} (<= {5 / np.sqrt(m):.3f}); KS p = {pval:.3f} (> 0.01)")


def test_c06_plane_average(grid64):
    nu = 1
    lams = [2, 4, 8, 16]
    ratios, raws = [], []
    for lam in lams:
        f = fields.band_field(grid64, lam, np.random.default_rng(lam))
        r = averaging.plane_avg(f, lam, nu, 2, 200, np.random.default_rng(106))
        ratios.append(r.value)
        raws.append(r.extra["raw"])
    slope = np.polyfit(np.log([nu / lam for lam in lams]), np.log(raws), 1)[0]
    ok = max(ratios) <= 4 and abs(slope - 0.5) <= 0.15
    verdict(6, ok, f"max ratio {max(ratios):.3f} (<= 4); (nu/lam)-exponent {slope:.3f} (1/2 +- 0.15)")


def test_c07_tau_average(grid64):
    rows = []
    ok = True
    for modes in ([(1, 0, 0)], [(1, 1, 0), (0, 2, 1)]):
        c = np.zeros(grid64.shape, dtype=complex)
        for m in modes:
            c[grid64.lattice_index(m)] = 1.0
        f = SpectralField(grid64, c)
        r4 = averaging.avg_qnorm(f, 4, 2000, np.random.default_rng(107))
        r8 = averaging.avg_qnorm(f, 8, 2000, np.random.default_rng(108))
        half = r8.extra["lhs"] / r4.extra["lhs"]
        ok &= max(r4.value, r8.value) <= 10 and abs(half - 0.5) <= 0.3 * 0.5
        rows.append(f"lhs/rhs {r4.value:.3f}, {r8.value:.3f}; lhs(2M)/lhs(M) {half:.3f}")
    verdict(7, ok, " | ".join(rows) + " (need <= 10 and 0.5 +- 30%)")


# ---------------------------------------------------------------- shared N = 64 solves


@pytest.fixture(scope="module")
def cgo_runs(bump64):
    _, pd = bump64
    rng = np.random.default_rng(108)
    out = {}
    for tau in (12, 24):
        runs = []
        for _ in range(8):
            z = zeta_for(tau, rng)
            sol = solve_cgo(pd.q, z)
            fine, _ = verify_residual(pd.q, sol)
            qn = x_norm(forward_transform(pd.q), z, -0.5, homogeneous=True)
            runs.append((sol, fine, qn))
        out[tau] = runs
    return out


@pytest.fixture(scope="module")
def recovery_runs(bump64):
    _, pd = bump64
    rng = np.random.default_rng(109)
    k = np.array([1.0, 2.0, 2.0])
    return {tau: [recover_fourier(pd.q, k, tau * GENERIC_TAU_FACTOR, haar.sample_haar(3, rng))
                  for _ in range(8)] for tau in (12, 24)}


def test_c08_cgo_contraction(cgo_runs):
    ok = True
    med = {}
    worst_fine = worst_rho = worst_share = 0.0
    for tau, runs in cgo_runs.items():
        for sol, fine, qn in runs:
            rho = max(sol.ratios) if sol.ratios else 0.0
            worst_rho = max(worst_rho, rho)
            worst_fine = max(worst_fine, fine)
            worst_share = max(worst_share, sol.norm() / qn)
        med[tau] = float(np.median([sol.norm() for sol, _, _ in runs]))
    ok = worst_rho < 1 and worst_fine <= 1e-8 and worst_share <= 2 and med[24] <= med[12]
    verdict(8, ok, f"max ratio {worst_rho:.3g} (< 1); fine residual {worst_fine:.2e} (<= 1e-8); "
                   f"max ||psi||/||q|| {worst_share:.3f} (<= 2); median ||psi|| {med[12]:.4f} -> {med[24]:.4f}")


def test_c09_recovery_trend(recovery_runs):
    med = {tau: float(np.median([abs(r.error) for r in rs])) for tau, rs in recovery_runs.items()}
    book = max(r.bookkeeping_defect for rs in recovery_runs.values() for r in rs)
    factor = med[12] / med[24]
    verdict(9, factor >= 1.3 and book <= 1e-10,
            f"median error {med[12]:.3e} -> {med[24]:.3e}, factor {factor:.2f} (>= 1.3); bookkeeping {book:.1e}")


def test_c10_alessandrini(recovery_runs, bump64, bump64_second):
    q1, q2 = bump64[1].q, bump64_second[1].q
    worst_null = 0.0
    rel = []
    for r in recovery_runs[24][:4]:
        pair = r.pair
        s1, s2q1 = r.solutions
        worst_null = max(worst_null, abs(alessandrini_gap(q1, q1, pair.k, pair, s1.psi, s2q1.psi)))
        s2 = solve_cgo(q2, pair.tilted()[1])
        gap = alessandrini_gap(q1, q2, pair.k, pair, s1.psi, s2.psi)
        diff = Field(q1.grid, q1.values - q2.values)
        lead, lin, bil = cgo.pairing_terms(diff, pair.k, s1.psi, s2.psi)
        share = abs(lin + bil) / abs(lead)
        if share < 0.25:
            rel.append(abs(abs(gap) - abs(lead)) / abs(lead))
    ok = worst_null <= 1e-12 and rel and max(rel) <= 0.25
    verdict(10, ok, f"null gap {worst_null:.1e} (<= 1e-12); max |gap - direct|/direct "
                    f"{max(rel) if rel else float('nan'):.3f} over {len(rel)} pairs (<= 0.25)")


def test_c11_gaidentity(bump64, bump64_second):
    d = gradient_identity_check(bump64[0], bump64_second[0])
    verdict(11, d <= 1e-6, f"relative discrepancy {d:.2e} at N = 64 (<= 1e-6)")


def test_c12_determinism(tmp_path):
    cfg = ROOT / "configs" / "smoke.ini"
    outs = []
    for threads, name in ((1, "serial"), (8, "threaded")):
        out = tmp_path / name
        proc = subprocess.run(
            [sys.executable, "-m", "cgolab", "run", str(cfg), "--out", str(out), "--threads", str(threads)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(((out / "results.csv").read_bytes(), (out / "manifest.json").read_bytes()))
    same = outs[0] == outs[1]
    verdict(12, same, f"full suite serial vs 8 threads: results.csv and manifest.json "
                      f"{'byte-identical' if same else 'differ'} ({len(outs[0][0])} bytes)")

"""Experiment catalog for the CLI runner.

Each experiment expands a config into independent cells.  A cell receives its
own counter-based random stream keyed by ``(seed, experiment, cell key)`` and
returns rows ``(tau, sample_id, quantity, value)`` plus gate outcomes, so the
output does not depend on how cells are scheduled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

from . import cgo, fields, recovery
from .config import ConfigError, check_nyquist
from .phase import GENERIC_TAU_FACTOR, PhaseVector
from .spaces import x_norm
from .spectral import Field, SpectralField, forward_transform, inverse_transform, make_grid
from .stat_lab import averaging, dyadic, haar, operators, strichartz


@dataclass
class Gate:
    experiment: str
    name: str
    value: float
    limit: float
    passed: bool


@dataclass
class CellResult:
    rows: list = field(default_factory=list)
    gates: list = field(default_factory=list)

    def add(self, tau, sample_id, quantity, value):
        self.rows.append((tau, str(sample_id), quantity, float(value)))

    def gate(self, experiment, name, value, limit, passed=None):
        ok = bool(value <= limit) if passed is None else bool(passed)
        self.gates.append(Gate(experiment, name, float(value), float(limit), ok))


@dataclass(frozen=True)
class Experiment:
    name: str
    checks: str
    operations: tuple
    required: tuple
    quantities: tuple
    cells: Callable
    summary: Callable = None


CATALOG = {}


def register(name, checks, operations, required, quantities, summary=None):
    def deco(fn):
        CATALOG[name] = Experiment(name, checks, tuple(operations), tuple(required), tuple(quantities), fn, summary)
        return fn

    return deco


# ---------------------------------------------------------------- helpers


def generic(tau):
    return float(tau) * GENERIC_TAU_FACTOR


def grid_of(cfg):
    return make_grid(cfg.n, cfg.N, cfg.L)


def taus(cfg, name, key="tau"):
    ts = cfg.get(key, name)
    check_nyquist(cfg, max(ts))
    return ts


def count(cfg, name, key):
    v = cfg.get(key, name)
    if len(v) != 1 or v[0] != int(v[0]) or v[0] < 1:
        raise ConfigError(f"physics.{key}: expected one positive integer")
    return int(v[0])


def scalar(cfg, name, key):
    v = cfg.get(key, name)
    if len(v) != 1:
        raise ConfigError(f"physics.{key}: expected one value")
    return v[0]


def haar_zeta(tau, grid, rng):
    U = haar.sample_haar(grid.n, rng).U
    return PhaseVector.from_frame(generic(tau), U)


def potential(cfg, grid, key="gamma"):
    spec = recovery.parse_conductivity(cfg.get(key, "gamma"))
    cond = recovery.make_conductivity(spec, grid)
    return cond, cgo.schrodinger_potential(cond, tol=cfg.tolerances["potential"])


def kid(k):
    return "k" + "_".join(str(int(round(c))) for c in k)


# ---------------------------------------------------------------- conjugated Laplacian


@register(
    "carleman",
    "Delta_zeta^{-1} is an isometry Xdot^{-1/2} -> Xdot^{1/2} (matched floored weights)",
    ["apply_inverse_delta_zeta"],
    ["tau", "samples"],
    ["dz_inverse_isometry"],
)
def _carleman(cfg):
    grid = grid_of(cfg)
    out = []
    for tau in taus(cfg, "carleman"):
        for i in range(count(cfg, "carleman", "samples")):
            def run(rng, tau=tau, i=i):
                res = CellResult()
                z = haar_zeta(tau, grid, rng)
                g = fields.random_field(grid, rng)
                dev = abs(cgo.carleman_ratio(inverse_transform(g), z) - 1)
                res.add(tau, f"s{i}", "dz_inverse_isometry", dev)
                res.gate("carleman", f"isometry tau={tau:g} s{i}", dev, cfg.tolerances["isometry"])
                return res
            out.append(((tau, i), run))
    return out


@register(
    "conjugation",
    "multiplier p_zeta equals Delta + 2 zeta.grad assembled from spectral derivatives",
    ["symbol_p"],
    ["tau", "samples"],
    ["conjugation_defect"],
)
def _conjugation(cfg):
    grid = grid_of(cfg)
    out = []
    for tau in taus(cfg, "conjugation"):
        for i in range(count(cfg, "conjugation", "samples")):
            def run(rng, tau=tau, i=i):
                res = CellResult()
                z = haar_zeta(tau, grid, rng)
                w = fields.real_random_field(grid, rng)
                d = cgo.conjugation_defect(w, z)
                res.add(tau, f"s{i}", "conjugation_defect", d)
                res.gate("conjugation", f"defect tau={tau:g} s{i}", d, cfg.tolerances["conjugation"])
                return res
            out.append(((tau, i), run))
    return out


# ---------------------------------------------------------------- estimates


@register(
    "strichartz",
    "band-limited L^p bound ||Q_lam f||_p <~ (lam/tau)^{1/n} ||f||_{X^{1/2}}, p = 2n/(n-2)",
    ["strichartz_constant"],
    ["tau", "lam", "trials"],
    ["strichartz_band_ratio", "strichartz_constant", "strichartz_exponent"],
)
def _strichartz(cfg):
    grid = grid_of(cfg)
    lams = [int(v) for v in cfg.get("lam", "strichartz")]
    trials = count(cfg, "strichartz", "trials")
    out = []
    for tau in taus(cfg, "strichartz"):
        def run(rng, tau=tau):
            res = CellResult()
            z = haar_zeta(tau, grid, rng)
            ok = [lam for lam in lams if lam <= z.tau / (8 * grid.d0)]
            if not ok:
                raise ConfigError(f"physics.lam: no band satisfies lam <= tau/8 for tau = {tau:g}")
            reps = [strichartz.strichartz_constant(z, lam, trials, rng, grid) for lam in ok]
            for lam, r in zip(ok, reps):
                res.add(tau, f"lam{lam}", "strichartz_band_ratio", r.value)
                res.add(tau, f"lam{lam}", "strichartz_constant", r.extra["constant"])
            if len(ok) > 1:
                slope = np.polyfit(np.log(ok), np.log([r.value for r in reps]), 1)[0]
                res.add(tau, "fit", "strichartz_exponent", slope)
            return res
        out.append(((tau,), run))
    return out


@register(
    "dyadic",
    "dyadic bilinear sums over modulation bands are bounded uniformly in tau",
    ["verify_dyadic_sums"],
    ["dims", "theta", "tau_exp"],
    ["dyadic_leq_constant", "dyadic_geq_constant", "dyadic_leq_variation",
     "dyadic_geq_variation", "dyadic_fitted_alpha"],
)
def _dyadic(cfg):
    dims = [int(v) for v in cfg.get("dims", "dyadic")]
    thetas = cfg.get("theta", "dyadic")
    if len(dims) != len(thetas):
        raise ConfigError("physics.theta: needs one value per entry of physics.dims")
    tau_range = [2.0**e for e in cfg.get("tau_exp", "dyadic")]
    out = []
    for n, theta in zip(dims, thetas):
        def run(rng, n=n, theta=theta):
            res = CellResult()
            s, p = dyadic.exponent_pair(n, theta)
            r = dyadic.verify_dyadic_sums(n, s, p, theta, tau_range)
            sid = f"n{n}.theta{theta:g}"
            for q in ("leq_constant", "geq_constant", "leq_variation", "geq_variation", "fitted_alpha"):
                res.add("", sid, "dyadic_" + q, r.extra[q])
            return res
        out.append(((n, theta), run))
    return out


@register(
    "haar",
    "QR-based sampler is Haar on O(n): second moments and sphere marginal",
    ["sample_haar"],
    ["samples"],
    ["haar_mean_deviation", "haar_ks_pvalue", "haar_orthogonality"],
)
def _haar(cfg):
    n = cfg.n
    m = count(cfg, "haar", "samples")

    def run(rng):
        res = CellResult()
        acc = np.zeros((n, n))
        dots = np.empty(m)
        orth = 0.0
        v = np.ones(n) / np.sqrt(n)
        for i in range(m):
            U = haar.sample_haar(n, rng).U
            u = U[:, 0]
            acc += np.outer(u, u)
            dots[i] = U[:, -1] @ v
            orth = max(orth, np.max(np.abs(U.T @ U - np.eye(n))))
        dev = np.max(np.abs(acc / m - np.eye(n) / n))
        pval = stats.kstest(dots, lambda t: haar.sphere_marginal_cdf(t, n)).pvalue
        res.add("", "all", "haar_mean_deviation", dev)
        res.add("", "all", "haar_ks_pvalue", pval)
        res.add("", "all", "haar_orthogonality", orth)
        res.gate("haar", "second moment", dev, 5 / np.sqrt(m))
        res.gate("haar", "ks p-value > 0.01", pval, 0.01, passed=pval > 0.01)
        return res

    return [((), run)]


def _planeavg_summary(cfg, rows):
    raw = {}
    nu = int(scalar(cfg, "planeavg", "nu"))
    for tau, sid, q, v in rows:
        if q == "planeavg_raw":
            raw[int(sid[3:])] = v
    if len(raw) < 2:
        return []
    lams = sorted(raw)
    slope = np.polyfit(np.log([nu / lam for lam in lams]), np.log([raw[lam] for lam in lams]), 1)[0]
    return [("", "fit", "planeavg_exponent", float(slope))]


@register(
    "planeavg",
    "Haar average of (lam/nu)^{1/p} ||P_lam P^{Ue1}_{<=nu} f||_p is bounded by ||f||_p",
    ["plane_avg"],
    ["lam", "nu", "p", "samples"],
    ["planeavg_ratio", "planeavg_raw", "planeavg_exponent"],
    summary=_planeavg_summary,
)
def _planeavg(cfg):
    grid = grid_of(cfg)
    nu = int(scalar(cfg, "planeavg", "nu"))
    p = scalar(cfg, "planeavg", "p")
    m = count(cfg, "planeavg", "samples")
    out = []
    for lam in [int(v) for v in cfg.get("lam", "planeavg")]:
        def run(rng, lam=lam):
            res = CellResult()
            f = fields.band_field(grid, lam, rng)
            r = averaging.plane_avg(f, lam, nu, p, m, rng)
            res.add("", f"lam{lam}", "planeavg_ratio", r.value)
            res.add("", f"lam{lam}", "planeavg_raw", r.extra["raw"])
            return res
        out.append(((lam,), run))
    return out


def _qavg_summary(cfg, rows):
    lhs = {float(sid[1:]): v for _, sid, q, v in rows if q == "qavg_lhs"}
    return [("", f"M{M:g}", "qavg_halving", lhs[2 * M] / lhs[M]) for M in sorted(lhs) if 2 * M in lhs]


@register(
    "qavg",
    "average over tau in [M, 2M] and Haar U of ||f||^2_{Xdot^{-1/2}} is controlled by Hdot norms",
    ["avg_qnorm"],
    ["M", "k", "samples"],
    ["qavg_lhs", "qavg_rhs", "qavg_constant", "qavg_halving"],
    summary=_qavg_summary,
)
def _qavg(cfg):
    grid = grid_of(cfg)
    Ms = cfg.get("M", "qavg")
    check_nyquist(cfg, 2 * max(Ms))
    k = cfg.get("k", "qavg")[0]
    m = count(cfg, "qavg", "samples")
    out = []
    for M in Ms:
        def run(rng, M=M):
            res = CellResult()
            c = np.zeros(grid.shape, dtype=complex)
            c[grid.lattice_index(np.asarray(k) * grid.d0)] = 1.0
            r = averaging.avg_qnorm(SpectralField(grid, c), M, m, rng)
            res.add("", f"M{M:g}", "qavg_lhs", r.extra["lhs"])
            res.add("", f"M{M:g}", "qavg_rhs", r.extra["rhs"])
            res.add("", f"M{M:g}", "qavg_constant", r.value)
            return res
        out.append(((M,), run))
    return out


@register(
    "bilinear",
    "||m_{grad f}||_{X^{1/2} -> X^{-1/2}} against ||f||_inf / tau and the dyadic right-hand side",
    ["bilinear_norm"],
    ["tau", "samples", "gamma"],
    ["bilinear_norm_q", "bilinear_norm_grad", "bilinear_linf_bound", "bilinear_rhs_ratio"],
)
def _bilinear(cfg):
    grid = grid_of(cfg)
    _, pd = potential(cfg, grid)
    s, p = dyadic.exponent_pair(cfg.n, 0.0) if cfg.n in (3, 4) else (1.0, float(cfg.n))
    out = []
    for tau in taus(cfg, "bilinear"):
        for i in range(count(cfg, "bilinear", "samples")):
            def run(rng, tau=tau, i=i):
                res = CellResult()
                z = haar_zeta(tau, grid, rng)
                rq = operators.bilinear_norm(pd.q, z, "mf", 1, rng)
                rg = operators.bilinear_norm(pd.f, z, "m_grad_f", 1, rng)
                rhs = operators.gradient_multiplier_rhs(pd.f, z, s, p)
                res.add(tau, f"s{i}", "bilinear_norm_q", rq.value)
                res.add(tau, f"s{i}", "bilinear_norm_grad", rg.value)
                res.add(tau, f"s{i}", "bilinear_linf_bound", rg.extra["linf_bound"])
                res.add(tau, f"s{i}", "bilinear_rhs_ratio", rg.value / rhs)
                return res
            out.append(((tau, i), run))
    return out


@register(
    "localization",
    "multiplication by a cut-off maps Xdot^{1/2} -> X^{1/2} and X^{-1/2} -> Xdot^{-1/2}",
    ["verify_localization"],
    ["tau", "radius", "width", "trials"],
    ["localization_forward", "localization_dual"],
)
def _localization(cfg):
    grid = grid_of(cfg)
    width = scalar(cfg, "localization", "width")
    trials = count(cfg, "localization", "trials")
    out = []
    for tau in taus(cfg, "localization"):
        for rad in cfg.get("radius", "localization"):
            def run(rng, tau=tau, rad=rad):
                res = CellResult()
                z = haar_zeta(tau, grid, rng)
                r = operators.verify_localization(operators.PhiSpec(rad, width), z, trials, rng, grid)
                res.add(tau, f"R{rad:g}", "localization_forward", r.extra["forward"])
                res.add(tau, f"R{rad:g}", "localization_dual", r.extra["dual"])
                return res
            out.append(((tau, rad), run))
    return out


@register(
    "zeta_stability",
    "X^b norms for nearby null vectors agree up to (1 + |zeta - zeta~|)^{|b|}",
    ["verify_zeta_stability", "make_zeta_pair"],
    ["tau", "r", "trials"],
    ["zeta_stability_constant", "zeta_stability_bound", "zeta_stability_distance"],
)
def _zeta_stability(cfg):
    grid = grid_of(cfg)
    r = scalar(cfg, "zeta_stability", "r")
    trials = count(cfg, "zeta_stability", "trials")
    out = []
    for tau in taus(cfg, "zeta_stability"):
        def run(rng, tau=tau):
            res = CellResult()
            U = haar.sample_haar(grid.n, rng)
            pair = recovery.make_zeta_pair(generic(tau), r, U, grid)
            rep = operators.verify_zeta_stability(pair.zeta1, pair.zt1, trials, rng, grid)
            res.add(tau, "s0", "zeta_stability_constant", rep.value)
            res.add(tau, "s0", "zeta_stability_bound", rep.extra["bound"])
            res.add(tau, "s0", "zeta_stability_distance", rep.extra["distance"])
            res.gate("zeta_stability", f"constant tau={tau:g}", rep.value, rep.extra["bound"])
            return res
        out.append(((tau,), run))
    return out


# ---------------------------------------------------------------- CGO and recovery


@register(
    "cgo",
    "Picard iteration for psi contracts; ||psi||_{Xdot^{1/2}} <~ ||q||_{Xdot^{-1/2}}",
    ["solve_cgo"],
    ["tau", "samples", "gamma"],
    ["cgo_residual", "cgo_residual_fine", "cgo_floor_defect", "cgo_max_ratio",
     "cgo_iterations", "cgo_psi_norm", "cgo_q_norm", "cgo_psi_over_q"],
)
def _cgo(cfg):
    grid = grid_of(cfg)
    _, pd = potential(cfg, grid)
    qc = forward_transform(pd.q)
    out = []
    for tau in taus(cfg, "cgo"):
        for i in range(count(cfg, "cgo", "samples")):
            def run(rng, tau=tau, i=i):
                res = CellResult()
                z = haar_zeta(tau, grid, rng)
                sol = cgo.solve_cgo(pd.q, z, tol=cfg.tolerances["cgo_tol"])
                fine, _ = cgo.verify_residual(pd.q, sol)
                qn = x_norm(qc, z, -0.5, homogeneous=True)
                rho = max(sol.ratios) if sol.ratios else 0.0
                sid = f"s{i}"
                res.add(tau, sid, "cgo_residual", sol.residual)
                res.add(tau, sid, "cgo_residual_fine", fine)
                res.add(tau, sid, "cgo_floor_defect", sol.floor_defect)
                res.add(tau, sid, "cgo_max_ratio", rho)
                res.add(tau, sid, "cgo_iterations", sol.iterations)
                res.add(tau, sid, "cgo_psi_norm", sol.norm())
                res.add(tau, sid, "cgo_q_norm", qn)
                res.add(tau, sid, "cgo_psi_over_q", sol.norm() / qn)
                res.gate("cgo", f"residual tau={tau:g} {sid}", fine, cfg.tolerances["cgo_residual"])
                res.gate("cgo", f"ratio < 1 tau={tau:g} {sid}", rho, 1.0, passed=rho < 1)
                return res
            out.append(((tau, i), run))
    return out


def _recovery_summary(cfg, rows):
    groups = {}
    for tau, sid, q, v in rows:
        if q == "recovery_error":
            groups.setdefault((tau, sid.split(".")[0]), []).append(v)
    return [(tau, k, "recovery_median_error", float(np.median(v))) for (tau, k), v in groups.items()]


@register(
    "recovery",
    "pairing q against a CGO pair returns q_hat(k) up to remainders that shrink with tau",
    ["make_conductivity", "recover_fourier"],
    ["tau", "k", "samples", "gamma"],
    ["recovery_error", "recovery_bookkeeping", "recovery_linear", "recovery_bilinear",
     "recovery_qhat_true", "recovery_median_error"],
    summary=_recovery_summary,
)
def _recovery(cfg):
    grid = grid_of(cfg)
    _, pd = potential(cfg, grid)
    ks = cfg.get("k", "recovery")
    out = []
    for k in ks:
        for tau in taus(cfg, "recovery"):
            for i in range(count(cfg, "recovery", "samples")):
                def run(rng, k=k, tau=tau, i=i):
                    res = CellResult()
                    U = haar.sample_haar(grid.n, rng)
                    r = recovery.recover_fourier(pd.q, np.asarray(k) * grid.d0, generic(tau), U,
                                                 tol=cfg.tolerances["cgo_tol"])
                    sid = f"{kid(k)}.s{i}"
                    res.add(tau, sid, "recovery_error", abs(r.error))
                    res.add(tau, sid, "recovery_bookkeeping", r.bookkeeping_defect)
                    res.add(tau, sid, "recovery_linear", abs(r.linear))
                    res.add(tau, sid, "recovery_bilinear", abs(r.bilinear))
                    res.add(tau, sid, "recovery_qhat_true", abs(r.qhat_true))
                    res.gate("recovery", f"bookkeeping {sid} tau={tau:g}", r.bookkeeping_defect,
                             cfg.tolerances["bookkeeping"])
                    return res
                out.append(((tuple(k), tau, i), run))
    return out


@register(
    "selection",
    "averaged smallness functional picks (tau, U) with small delta; delta falls as M grows",
    ["select_parameters"],
    ["M", "eps_ball", "samples", "gamma"],
    ["selection_delta", "selection_tau", "selection_draws"],
)
def _selection(cfg):
    grid = grid_of(cfg)
    Ms = cfg.get("M", "selection")
    check_nyquist(cfg, 2 * max(Ms))
    _, pd = potential(cfg, grid)
    eps = scalar(cfg, "selection", "eps_ball")
    m = count(cfg, "selection", "samples")
    out = []
    for M in Ms:
        def run(rng, M=M):
            res = CellResult()
            sel = recovery.select_parameters(pd.q, pd.q, M, eps, m, rng)
            res.add("", f"M{M:g}", "selection_delta", sel.delta)
            res.add("", f"M{M:g}", "selection_tau", sel.tau)
            res.add("", f"M{M:g}", "selection_draws", sel.draws)
            return res
        out.append(((M,), run))
    return out


@register(
    "alessandrini",
    "<q1 - q2, v1 v2> vanishes for equal potentials and tracks q1_hat - q2_hat otherwise",
    ["alessandrini_gap"],
    ["tau", "k", "samples", "gamma", "gamma2"],
    ["gap_null", "gap_abs", "gap_direct", "gap_remainder_share"],
)
def _alessandrini(cfg):
    grid = grid_of(cfg)
    _, p1 = potential(cfg, grid)
    _, p2 = potential(cfg, grid, "gamma2")
    q1, q2 = p1.q, p2.q
    out = []
    for k in cfg.get("k", "alessandrini"):
        for tau in taus(cfg, "alessandrini"):
            for i in range(count(cfg, "alessandrini", "samples")):
                def run(rng, k=k, tau=tau, i=i):
                    res = CellResult()
                    kk = np.asarray(k) * grid.d0
                    U = haar.sample_haar(grid.n, rng)
                    r1 = recovery.recover_fourier(q1, kk, generic(tau), U, tol=cfg.tolerances["cgo_tol"])
                    pair = r1.pair
                    _, z2 = pair.tilted()
                    s1 = r1.solutions[0]
                    s2 = cgo.solve_cgo(q2, z2, tol=cfg.tolerances["cgo_tol"])
                    null = recovery.alessandrini_gap(q1, q1, pair.k, pair, s1.psi, r1.solutions[1].psi)
                    gap = recovery.alessandrini_gap(q1, q2, pair.k, pair, s1.psi, s2.psi)
                    idx = grid.lattice_index(-pair.k)
                    direct = grid.volume * abs(forward_transform(q1).coeffs[idx] - forward_transform(q2).coeffs[idx])
                    diff = Field(grid, q1.values - q2.values)
                    lead, lin, bil = cgo.pairing_terms(diff, pair.k, s1.psi, s2.psi)
                    sid = f"{kid(k)}.s{i}"
                    res.add(tau, sid, "gap_null", abs(null))
                    res.add(tau, sid, "gap_abs", abs(gap))
                    res.add(tau, sid, "gap_direct", direct)
                    res.add(tau, sid, "gap_remainder_share", abs(lin + bil) / max(abs(lead), 1e-300))
                    res.gate("alessandrini", f"null {sid} tau={tau:g}", abs(null), cfg.tolerances["gap_null"])
                    return res
                out.append(((tuple(k), tau, i), run))
    return out


@register(
    "gaidentity",
    "int (g2 grad g1 - g1 grad g2).grad w = int g1 g2 |grad w|^2 with w = log(g1/g2)",
    ["gradient_identity_check"],
    ["gamma", "gamma2"],
    ["gaidentity_discrepancy"],
)
def _gaidentity(cfg):
    grid = grid_of(cfg)

    def run(rng):
        res = CellResult()
        c1 = recovery.make_conductivity(recovery.parse_conductivity(cfg.get("gamma", "gaidentity")), grid)
        c2 = recovery.make_conductivity(recovery.parse_conductivity(cfg.get("gamma2", "gaidentity")), grid)
        d = recovery.gradient_identity_check(c1, c2)
        res.add("", "s0", "gaidentity_discrepancy", d)
        res.gate("gaidentity", "discrepancy", d, cfg.tolerances["gaidentity"])
        return res

    return [((), run)]


def all_quantities():
    return {q for e in CATALOG.values() for q in e.quantities}

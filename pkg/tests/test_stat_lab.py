import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgolab import fields
from cgolab.phase import GridSymbol, PhaseVector
from cgolab.spectral import Field, SpectralField
from cgolab.stat_lab import averaging, dyadic, haar, operators, strichartz
from cgolab.stat_lab.report import EstimateReport

ZETA = PhaseVector(4.0 * (1 + 1e-6), [1, 0, 0], [0, 1, 0])


# ---------------------------------------------------------------- Haar


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31))
def test_haar_samples_are_orthogonal(n, seed):
    s = haar.sample_haar(n, np.random.default_rng(seed))
    assert np.allclose(s.U.T @ s.U, np.eye(n), atol=1e-12)
    assert s.det in (-1, 1)


def test_haar_hits_both_components():
    rng = np.random.default_rng(0)
    dets = {haar.sample_haar(3, rng).det for _ in range(50)}
    assert dets == {-1, 1}
    with pytest.raises(ValueError):
        haar.OrthogonalSample(np.ones((2, 2)), 1)


def test_haar_ball_rejection():
    s, tries = haar.sample_haar_ball(3, 1.0, np.random.default_rng(1))
    assert np.linalg.norm(s.U - np.eye(3), 2) < 1.0 and tries >= 1
    with pytest.raises(haar.RejectionError):
        haar.sample_haar_ball(3, 1e-3, np.random.default_rng(1), max_tries=10)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_sphere_marginal(n):
    from scipy.integrate import quad

    assert quad(lambda t: haar.sphere_marginal_pdf(t, n), -1, 1)[0] == pytest.approx(1.0, abs=1e-6)
    assert haar.sphere_marginal_cdf(0.0, n) == pytest.approx(0.5)
    t = 0.3
    assert haar.sphere_marginal_cdf(t, n) == pytest.approx(
        quad(lambda s: haar.sphere_marginal_pdf(s, n), -1, t)[0], abs=1e-6)


# ---------------------------------------------------------------- averaging


def test_plane_average_bounds(grid32):
    f = fields.band_field(grid32, 4, np.random.default_rng(2))
    r = averaging.plane_avg(f, 4, 4, 2, 20, np.random.default_rng(3))
    # nu = lam keeps the whole band: A(U) = ||P_4 f|| <= ||f||
    assert r.value <= 1.0 + 1e-12
    r1 = averaging.plane_avg(f, 4, 1, 2, 50, np.random.default_rng(3))
    assert r1.extra["raw"] < r.extra["raw"]
    with pytest.raises(ValueError):
        averaging.plane_avg(f, 2, 4, 2, 5)
    with pytest.raises(ValueError):
        averaging.plane_avg(f, 4, 1, 1.5, 5)


def test_plane_average_lp(grid16):
    f = fields.band_field(grid16, 2, np.random.default_rng(4))
    r = averaging.plane_avg(f, 2, 1, 4, 5, np.random.default_rng(5))
    assert 0 < r.value < 4


def test_tau_average_matches_quadrature(grid32):
    c = np.zeros(grid32.shape, dtype=complex)
    c[grid32.lattice_index([1, 0, 0])] = 1.0
    f = SpectralField(grid32, c)
    r = averaging.avg_qnorm(f, 4, 4000, np.random.default_rng(6))
    exact = averaging.qavg_quadrature(1.0, 4) * grid32.volume
    assert r.extra["lhs"] == pytest.approx(exact, rel=5 * r.dispersion * r.extra["rhs"] / exact + 0.01)


def test_tau_average_guards(grid16):
    f = SpectralField(grid16, np.ones(grid16.shape))
    with pytest.raises(ValueError):
        averaging.avg_qnorm(f, 2, 10)
    with pytest.raises(averaging.NyquistError):
        averaging.avg_qnorm(f, 5, 10)


# ---------------------------------------------------------------- power iteration


def test_power_norm_diagonal():
    d = np.array([3.0, -1.0, 0.5, 2.0])
    r = operators.power_norm(lambda x: d * x, lambda y: d * y, np.ones(4), stagnation=1e-12, max_iter=500)
    assert r.converged and r.value == pytest.approx(3.0, rel=1e-8)


def test_power_norm_reports_non_convergence():
    rot = np.array([[0.0, -1.0], [1.0, 0.0]]) * np.array([1.0, 0.999999])
    r = operators.power_norm(lambda x: rot @ x, lambda y: rot.T @ y, np.array([1.0, 1.0]), max_iter=2,
                             stagnation=0.0)
    assert not r.converged and r.iterations == 2


def test_bilinear_norm_of_constant(grid16):
    # multiplication by c is diagonal: its norm is c / min(|p| + tau) = c / tau
    f = Field(grid16, np.full(grid16.shape, 0.7))
    r = operators.bilinear_norm(f, ZETA, "mf", 1, np.random.default_rng(0))
    assert r.value == pytest.approx(0.7 / ZETA.tau, rel=1e-3)
    assert r.value <= r.extra["linf_bound"] * (1 + 1e-9)


def test_bilinear_norm_gradient_mode(bump32):
    _, pd = bump32
    r = operators.bilinear_norm(pd.f, ZETA, "m_grad_f", 1, np.random.default_rng(0))
    rq = operators.bilinear_norm(pd.q, ZETA, "mf", 1, np.random.default_rng(0))
    assert 0 < r.value <= r.extra["linf_bound"]
    assert rq.value > 0
    with pytest.raises(ValueError):
        operators.bilinear_norm(pd.q, ZETA, "m_grad_f")


def test_adjoint_flip(grid16, rng):
    m = fields.gaussian_coeffs(grid16, rng, grid16.xi_abs < 3)
    x = fields.gaussian_coeffs(grid16, rng)
    y = fields.gaussian_coeffs(grid16, rng)
    from cgolab.spectral import padded_values, product_coeffs

    lhs = np.vdot(y, product_coeffs(padded_values(m), x))
    rhs = np.vdot(product_coeffs(padded_values(np.conj(operators._flip(m))), y), x)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_localization_identity_cutoff(grid16):
    one = Field(grid16, np.ones(grid16.shape))
    r = operators.verify_localization(one, ZETA, 1, np.random.default_rng(0), grid16, weights="matched")
    assert r.extra["forward"] == pytest.approx(1.0, rel=1e-3)
    assert r.extra["dual"] == pytest.approx(1.0, rel=1e-3)


def test_localization_cutoff(grid16):
    phi = operators.PhiSpec(0.8, 0.6)
    vals = phi.field(grid16).values.real
    assert vals.max() == pytest.approx(1.0) and vals.min() == pytest.approx(0.0)
    r = operators.verify_localization(phi, ZETA, 1, np.random.default_rng(0), grid16)
    assert np.isfinite(r.value) and r.value > 0
    with pytest.raises(ValueError):
        operators.verify_localization(phi, ZETA, 1, None, grid16, weights="other")


def test_zeta_stability(grid16):
    r = operators.verify_zeta_stability(ZETA, ZETA, 3, np.random.default_rng(0), grid16)
    assert r.value == pytest.approx(1.0) and r.extra["distance"] == 0
    z2 = PhaseVector(4.5, [1, 0, 0], [0, 0.6, 0.8])
    r = operators.verify_zeta_stability(ZETA, z2, 5, np.random.default_rng(0), grid16)
    assert r.extra["monte_carlo"] <= r.value + 1e-12
    assert r.value <= r.extra["bound"]


def test_gradient_multiplier_rhs_dominates_linf_part(bump32):
    _, pd = bump32
    rhs = operators.gradient_multiplier_rhs(pd.f, ZETA, 1.0, 3.0)
    assert rhs >= operators.vector_lp(pd.f, 3)


# ---------------------------------------------------------------- Strichartz


def test_strichartz_preconditions(grid32):
    z = PhaseVector(4.0, [1, 0, 0], [0, 1, 0])
    with pytest.raises(strichartz.PreconditionError):
        strichartz.strichartz_constant(z, 1, 1, np.random.default_rng(0), grid32)
    assert strichartz.default_p(3) == 6


def test_strichartz_ratio_rejects_off_band(grid32):
    z = PhaseVector(8.0 * (1 + 1e-6), [1, 0, 0], [0, 1, 0])
    f = fields.random_field(grid32, np.random.default_rng(0))
    with pytest.raises(ValueError):
        strichartz.strichartz_ratio(f, z, 1)


def test_strichartz_ascent_beats_random_start(grid32):
    z = PhaseVector(8.0 * (1 + 1e-6), [0, 0, 1], [1, 0, 0])
    r = strichartz.strichartz_constant(z, 1, 2, np.random.default_rng(0), grid32, iters=10)
    sym = GridSymbol(grid32, z)
    from cgolab.phase import q_mask

    c = fields.gaussian_coeffs(grid32, np.random.default_rng(1), q_mask(sym, 1))
    plain = strichartz.strichartz_ratio(SpectralField(grid32, c), z, 1)
    assert r.value >= plain


# ---------------------------------------------------------------- dyadic sums


def test_exponent_pair():
    assert dyadic.exponent_pair(3, 0) == (1.0, 3.0)
    s, p = dyadic.exponent_pair(6, 0.5)
    assert p == pytest.approx(12) and s == pytest.approx(1 + 0.5 * (0.5 - 1 / 3))
    with pytest.raises(dyadic.ParameterRangeError):
        dyadic.exponent_pair(3, 0.5)
    with pytest.raises(dyadic.ParameterRangeError):
        dyadic.exponent_pair(7, 0)


def test_default_alphas():
    assert dyadic.default_alphas(3, 0) == pytest.approx((2 / 3, 1 / 3 + 1 / 2))
    leq, geq = dyadic.default_alphas(5, 0.9)
    assert leq == pytest.approx(0.1 / 5 + 0.45 + 0.5)
    assert geq == pytest.approx(0.1 / 5 + 0.45)  # (1-th)/n - th/2 < 0


def test_fitted_alpha_n3():
    assert dyadic.fitted_alpha(3, 0.0, 2.0**16) == pytest.approx(2 / 3, abs=0.05)


def test_dyadic_constants_are_bounded():
    s, p = dyadic.exponent_pair(3, 0)
    r = dyadic.verify_dyadic_sums(3, s, p, 0, [2.0**e for e in range(6, 15)])
    assert r.extra["leq_constant"] < 10 and r.extra["geq_constant"] < 10
    with pytest.raises(dyadic.ParameterRangeError):
        dyadic.verify_dyadic_sums(3, 1.5, p, 0, [64.0])


def test_report_validation():
    with pytest.raises(ValueError):
        EstimateReport("x", {}, 1.0, samples=1, min_samples=2)
    with pytest.raises(ValueError):
        EstimateReport("x", {}, 1.0, samples=1, dispersion=float("nan"))

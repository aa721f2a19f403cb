import numpy as np
import pytest

from cgolab.phase import PhaseVector
from cgolab.spaces import NormSpec, besov_profile, besov_sp_norm, h_tau_norm, hdot_norm, x_norm
from cgolab.spectral import Field, forward_transform, lp_norm


@pytest.fixture
def field(grid16, rng):
    return Field(grid16, rng.standard_normal(grid16.shape))


ZETA = PhaseVector(4.0, [1, 0, 0], [0, 1, 0])


def test_zero_exponent_is_l2(field):
    g = forward_transform(field)
    assert x_norm(g, ZETA, 0) == pytest.approx(lp_norm(field, 2))
    assert h_tau_norm(g, 0, 3.0) == pytest.approx(lp_norm(field, 2))


def test_weight_ordering(field):
    g = forward_transform(field)
    # |p| + tau >= floored |p|, so inhomogeneous norms dominate for b > 0
    assert x_norm(g, ZETA, 0.5) >= x_norm(g, ZETA, 0.5, homogeneous=True)
    assert x_norm(g, ZETA, -0.5) <= x_norm(g, ZETA, -0.5, homogeneous=True)


def test_plane_wave_norms(grid16):
    x = grid16.x
    f = Field(grid16, np.exp(2j * x[0]))
    g = forward_transform(f)
    l2 = lp_norm(f, 2)
    p = abs(-4 + 2j * 4.0 * 2)
    assert x_norm(g, ZETA, 0.5) == pytest.approx((p + 4.0) ** 0.5 * l2)
    assert h_tau_norm(g, 1, 3.0) == pytest.approx(np.sqrt(4 + 9) * l2)
    assert hdot_norm(g, -1) == pytest.approx(l2 / 2)


def test_normspec(field):
    assert NormSpec("x_inhom", 0.5, zeta=ZETA)(field) == pytest.approx(x_norm(forward_transform(field), ZETA, 0.5))
    assert NormSpec("lp", p=4)(field) == pytest.approx(lp_norm(field, 4))
    with pytest.raises(ValueError):
        NormSpec("x_hom")
    with pytest.raises(ValueError):
        NormSpec("nope")


def test_besov_profile_of_single_shell(grid16):
    f = Field(grid16, np.cos(4 * grid16.x[1]))
    prof = besov_profile(f, 2)
    assert prof[4] == pytest.approx(lp_norm(f, 2), rel=1e-12)
    assert besov_sp_norm(f, 1.0, 2) == pytest.approx(4 * lp_norm(f, 2), rel=1e-12)
    with pytest.raises(ValueError):
        besov_sp_norm(f, 1.0, np.inf)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgolab import fields
from cgolab.phase import lp_symbol
from cgolab.rng import as_generator, key_words, stream
from cgolab.spectral import fft_coeffs, lp_norm


def test_streams_are_keyed():
    a = stream(1, "cgo", 12.0, 3).standard_normal(4)
    assert np.array_equal(a, stream(1, "cgo", 12.0, 3).standard_normal(4))
    assert not np.array_equal(a, stream(1, "cgo", 12.0, 4).standard_normal(4))
    assert not np.array_equal(a, stream(2, "cgo", 12.0, 3).standard_normal(4))


@settings(max_examples=20)
@given(st.integers(0, 2**64 - 1), st.text(max_size=10))
def test_key_words_are_stable_u32(seed, name):
    w = key_words(seed, name)
    assert w == key_words(seed, name)
    assert len(w) == 4 and all(0 <= v < 2**32 for v in w)


def test_as_generator_passthrough():
    g = np.random.default_rng(0)
    assert as_generator(g) is g


def test_band_field_support(grid32):
    f = fields.band_field(grid32, 4, np.random.default_rng(0))
    c = fft_coeffs(f.values)
    sym = lp_symbol(grid32.xi_abs / grid32.d0, 4)
    assert np.abs(c[sym == 0]).max() < 1e-14
    assert np.abs(f.values.imag).max() == 0


def test_rough_series_shell_norms(grid32):
    f = fields.rough_series(grid32, 1.0, 3, 0.2, np.random.default_rng(1), lams=[4])
    assert lp_norm(f, 3) == pytest.approx(0.2 / 4)
    assert fields.top_band(grid32) >= 16

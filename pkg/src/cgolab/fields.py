"""Random-field ensembles.

Coefficients are complex Gaussian, independent per lattice site, masked to the
requested support.  Rough series are sums of Littlewood-Paley shells, each
rescaled so ``||P_lam f||_p`` follows a target power of ``lam``.
"""
from __future__ import annotations

import numpy as np

from .phase import dyadic_range, lp_symbol
from .spectral import Field, SpectralField, fft_coeffs, ifft_values, lp_norm
from .rng import as_generator


def gaussian_coeffs(grid, rng, mask=None):
    rng = as_generator(rng)
    c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    if mask is not None:
        c = c * mask
    return c


def random_field(grid, rng, mask=None):
    return SpectralField(grid, gaussian_coeffs(grid, rng, mask))


def real_random_field(grid, rng, mask=None):
    """Real white noise on the grid, optionally band-masked (mask must be even)."""
    rng = as_generator(rng)
    c = fft_coeffs(rng.standard_normal(grid.shape))
    if mask is not None:
        c = c * mask
    return Field(grid, ifft_values(c).real.astype(complex))


def band_field(grid, lam, rng):
    """Real field whose spectrum is ``chi_lam``-weighted noise (a band-``lam`` field)."""
    rho = grid.xi_abs / grid.d0
    return real_random_field(grid, rng, lp_symbol(rho, lam))


def top_band(grid):
    """Largest dyadic ``lam`` whose annulus still meets the grid."""
    return dyadic_range(1, 2 * grid.xi_abs.max() / grid.d0)[-1]


def rough_series(grid, decay, p, amplitude, rng, lams=None):
    """Real ``sum_lam g_lam`` with ``||P_lam g_lam||_p = amplitude * lam^-decay``."""
    rng = as_generator(rng)
    if lams is None:
        lams = [lam for lam in dyadic_range(2, top_band(grid)) if lam <= grid.N // 4]
    rho = grid.xi_abs / grid.d0
    total = np.zeros(grid.shape)
    for lam in lams:
        shell = real_random_field(grid, rng, lp_symbol(rho, lam))
        total += (amplitude * lam**-decay / lp_norm(shell, p)) * shell.values.real
    return Field(grid, total)

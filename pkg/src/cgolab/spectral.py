"""Periodic grids, discrete Fourier transforms, quadrature norms and
alias-free products.

Conventions (frozen)
--------------------
* Physical points are ``x_j = j * L / N`` for ``j = 0..N-1`` on every axis.
* Frequencies are ``xi = (2 pi / L) * m`` with integer ``m`` in
  ``[-N/2, N/2)``.  Arrays are stored in numpy FFT order (``0, 1, ...,
  N/2-1, -N/2, ..., -1``) along every axis.
* The coefficient at ``xi`` is ``(1/N^n) * sum_x f(x) exp(-i xi.x)`` so that
  ``f(x) = sum_xi c(xi) exp(i xi.x)`` on grid points.
* With that normalisation ``||f||_2^2 = L^n * sum |c|^2`` (Parseval).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft


class GridMismatchError(ValueError):
    pass


def _is_pow2(N):
    return isinstance(N, (int, np.integer)) and N > 0 and (N & (N - 1)) == 0


@dataclass(frozen=True)
class PeriodicGrid:
    n: int
    N: int
    L: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValueError(f"dimension n must be an integer >= 2, got {self.n!r}")
        if not _is_pow2(self.N) or self.N < 8:
            raise ValueError(f"N must be a power of two >= 8, got {self.N!r}")
        if not self.L > 0:
            raise ValueError(f"box length L must be positive, got {self.L!r}")

    @property
    def shape(self):
        return (self.N,) * self.n

    @property
    def size(self):
        return self.N**self.n

    @property
    def d0(self):
        """Lattice spacing ``2 pi / L`` (one frequency cell)."""
        return 2 * np.pi / self.L

    @property
    def xi_max(self):
        """Nyquist bound ``pi N / L``."""
        return np.pi * self.N / self.L

    @property
    def volume(self):
        return float(self.L) ** self.n

    @property
    def dx(self):
        return self.L / self.N

    @cached_property
    def k1d(self):
        k = sfft.fftfreq(self.N, d=1.0 / self.N) * self.d0
        k.flags.writeable = False
        return k

    @cached_property
    def x1d(self):
        x = np.arange(self.N) * self.dx
        x.flags.writeable = False
        return x

    @cached_property
    def xi(self):
        """Frequency vectors, shape ``(n, N, ..., N)``."""
        out = np.stack(np.meshgrid(*([self.k1d] * self.n), indexing="ij"))
        out.flags.writeable = False
        return out

    @cached_property
    def x(self):
        out = np.stack(np.meshgrid(*([self.x1d] * self.n), indexing="ij"))
        out.flags.writeable = False
        return out

    @cached_property
    def xi_sq(self):
        out = np.sum(self.xi**2, axis=0)
        out.flags.writeable = False
        return out

    @cached_property
    def xi_abs(self):
        out = np.sqrt(self.xi_sq)
        out.flags.writeable = False
        return out

    def center(self):
        return np.full(self.n, self.L / 2)

    def lattice_index(self, k):
        """FFT-order array index of lattice frequency ``k``; raises if off-lattice."""
        m = np.asarray(k, dtype=float) / self.d0
        mi = np.rint(m)
        if m.shape != (self.n,) or np.max(np.abs(m - mi)) > 1e-9:
            raise ValueError(f"frequency {k!r} is not on the lattice")
        mi = mi.astype(int)
        if np.any(mi < -self.N // 2) or np.any(mi >= self.N // 2):
            raise ValueError(f"frequency {k!r} is outside the represented band")
        return tuple(int(v) % self.N for v in mi)

    def refine(self, factor=2):
        return PeriodicGrid(self.n, self.N * factor, self.L)


def make_grid(n, N, L):
    return PeriodicGrid(n, N, float(L))


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples on the physical grid."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.shape != self.grid.shape:
            raise GridMismatchError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Coefficients on the frequency lattice (FFT order)."""

    grid: PeriodicGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coeffs)
        if c.shape != self.grid.shape:
            raise GridMismatchError(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "coeffs", c)


def _check_same(*grids):
    g0 = grids[0]
    for g in grids[1:]:
        if g != g0:
            raise GridMismatchError(f"grid mismatch: {g0} vs {g}")


def fft_coeffs(values):
    v = np.asarray(values)
    return sfft.fftn(v) / v.size


def ifft_values(coeffs):
    c = np.asarray(coeffs)
    return sfft.ifftn(c) * c.size


def forward_transform(f):
    if not isinstance(f, Field):
        raise TypeError("forward_transform expects a Field")
    return SpectralField(f.grid, fft_coeffs(f.values))


def inverse_transform(g):
    if not isinstance(g, SpectralField):
        raise TypeError("inverse_transform expects a SpectralField")
    return Field(g.grid, ifft_values(g.coeffs))


def lp_norm(f, p):
    """Riemann-sum ``L^p`` norm ``(L/N)^{n/p} (sum |f|^p)^{1/p}``; ``p = inf`` is the max."""
    if isinstance(f, SpectralField):
        f = inverse_transform(f)
    p = float(p)
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    m = a.max()
    if m == 0:
        return 0.0
    # scale out the max so large p does not overflow
    s = np.sum((a / m) ** p)
    return float(m * (f.grid.dx**f.grid.n * s) ** (1.0 / p))


def l2_coeff_norm(g):
    """Parseval ``L^2`` norm from coefficients: ``sqrt(L^n * sum |c|^2)``."""
    return float(np.sqrt(g.grid.volume) * np.linalg.norm(g.coeffs.ravel()))


def pad_coeffs(c, M):
    """Embed FFT-ordered coefficients on an ``N^n`` lattice into ``M^n`` (M >= N)."""
    N = c.shape[0]
    n = c.ndim
    out = np.zeros((M,) * n, dtype=complex)
    h = N // 2
    idx = np.r_[0:h, M - h:M]
    out[np.ix_(*([idx] * n))] = c
    return out


def truncate_coeffs(c, N):
    """Inverse of :func:`pad_coeffs`: keep frequencies in ``[-N/2, N/2)``."""
    M = c.shape[0]
    h = N // 2
    idx = np.r_[0:h, M - h:M]
    return c[np.ix_(*([idx] * c.ndim))]


def resample(f, grid):
    """Band-limited interpolation of ``f`` onto a finer grid with the same box."""
    if grid.L != f.grid.L or grid.n != f.grid.n or grid.N < f.grid.N:
        raise GridMismatchError("resample only refines on the same box")
    c = fft_coeffs(f.values)
    return Field(grid, ifft_values(pad_coeffs(c, grid.N)))


def padded_values(c):
    """Grid values of ``c`` on the 3/2-padded lattice (reusable factor for :func:`product_coeffs`)."""
    return ifft_values(pad_coeffs(c, 3 * c.shape[0] // 2))


def product_coeffs(a, b):
    """Alias-free product of two FFT-ordered coefficient arrays (3/2 rule).

    Either argument may be passed pre-padded via :func:`padded_values`.
    """
    N = min(a.shape[0], b.shape[0])
    fa = a if a.shape[0] > N else padded_values(a)
    fb = b if b.shape[0] > N else padded_values(b)
    return truncate_coeffs(fft_coeffs(fa * fb), N)


def dealiased_product(f, g):
    _check_same(f.grid, g.grid)
    c = product_coeffs(fft_coeffs(f.values), fft_coeffs(g.values))
    return Field(f.grid, ifft_values(c))


def spectral_gradient(f):
    """Spectral partial derivatives ``d_j f``, list of Fields."""
    c = fft_coeffs(f.values)
    return [Field(f.grid, ifft_values(1j * f.grid.xi[j] * c)) for j in range(f.grid.n)]


def spectral_laplacian(f):
    c = fft_coeffs(f.values)
    return Field(f.grid, ifft_values(-f.grid.xi_sq * c))


def integrate(f):
    """Riemann sum of ``f`` over the box (exact for trigonometric polynomials)."""
    return complex(np.sum(f.values) * f.grid.dx**f.grid.n)

"""Phase vectors, the conjugated-Laplacian symbol and frequency projections.

A phase vector is ``zeta = tau (e1 - i e2)`` with ``e1, e2`` orthonormal, so
``zeta . zeta = 0``.  Its symbol ``p(xi) = -|xi|^2 + 2 i zeta.xi`` vanishes on
the codimension-2 sphere ``{xi . e1 = 0, |xi - tau e2| = tau}``.

All dyadic scales (modulation bands and Littlewood-Paley annuli) are measured
in units of one frequency cell ``d0 = 2 pi / L``; band ``1`` is the collapsed
band ``{modulation <= 1 cell}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .spectral import SpectralField

#: irrational perturbation applied by the CLI to requested tau values
GENERIC_TAU_FACTOR = 1.0 + np.sqrt(2.0) * 1e-6


class NotNullError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PhaseVector:
    tau: float
    e1: np.ndarray
    e2: np.ndarray

    def __post_init__(self):
        e1 = np.array(self.e1, dtype=float)
        e2 = np.array(self.e2, dtype=float)
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if e1.shape != e2.shape or e1.ndim != 1:
            raise ValueError("e1, e2 must be vectors of the same length")
        if abs(e1 @ e1 - 1) > 1e-12 or abs(e2 @ e2 - 1) > 1e-12 or abs(e1 @ e2) > 1e-12:
            raise NotNullError("e1, e2 must be orthonormal to 1e-12")
        e1.flags.writeable = False
        e2.flags.writeable = False
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)

    @property
    def n(self):
        return self.e1.size

    @cached_property
    def zeta(self):
        return self.tau * (self.e1 - 1j * self.e2)

    @classmethod
    def from_complex(cls, zeta, tol=1e-12):
        """Recover the frame of a null vector ``zeta = a + i b``."""
        z = np.asarray(zeta, dtype=complex)
        a, b = z.real, z.imag
        tau = float(np.linalg.norm(a))
        if tau == 0 or abs(z @ z) > tol * tau**2:
            raise NotNullError(f"zeta is not a nonzero null vector (zeta.zeta = {z @ z})")
        e1 = a / tau
        e2 = -b / np.linalg.norm(b)
        # re-orthogonalise to shave off rounding
        e2 = e2 - (e2 @ e1) * e1
        e2 /= np.linalg.norm(e2)
        return cls(tau, e1, e2)

    @classmethod
    def from_frame(cls, tau, U, i=0, j=1):
        """``tau U (e_i - i e_j)`` for an orthogonal matrix ``U``."""
        U = np.asarray(U, dtype=float)
        return cls(tau, U[:, i].copy(), U[:, j].copy())

    def null_defect(self):
        z = self.zeta
        return abs(z @ z) / self.tau**2


def _dot(v, xi):
    v = np.asarray(v)
    return np.tensordot(v, np.asarray(xi), axes=(0, 0))


def symbol_p(zeta, xi):
    """``-|xi|^2 + 2 tau (xi.e2) + 2 i tau (xi.e1)``; ``xi`` has shape ``(n, ...)``."""
    xi = np.asarray(xi, dtype=float)
    sq = np.sum(xi**2, axis=0)
    return -sq + 2 * zeta.tau * _dot(zeta.e2, xi) + 2j * zeta.tau * _dot(zeta.e1, xi)


def symbol_p_complex(zeta_c, xi):
    """Direct evaluation ``-|xi|^2 + 2 i zeta.xi`` from the complex vector."""
    xi = np.asarray(xi, dtype=float)
    return -np.sum(xi**2, axis=0) + 2j * _dot(np.asarray(zeta_c), xi)


def modulation(zeta, xi):
    """Exact Euclidean distance from ``xi`` to the characteristic sphere."""
    xi = np.asarray(xi, dtype=float)
    x1 = _dot(zeta.e1, xi)
    perp = xi - np.multiply.outer(zeta.e1, x1)
    shifted = perp - zeta.tau * zeta.e2.reshape((-1,) + (1,) * (xi.ndim - 1))
    radial = np.sqrt(np.sum(shifted**2, axis=0)) - zeta.tau
    return np.sqrt(x1**2 + radial**2)


def symbol_weight(zeta, xi, d0, floor_cells=1.0):
    """Floored magnitude ``max(|p|, tau * d0 * floor_cells)``."""
    if floor_cells < 1:
        raise ValueError("floor_cells must be >= 1")
    return np.maximum(np.abs(symbol_p(zeta, xi)), zeta.tau * d0 * floor_cells)


class GridSymbol:
    """Per-(grid, zeta) table of symbol values; read-only and shareable."""

    def __init__(self, grid, zeta, floor_cells=1.0):
        self.grid = grid
        self.zeta = zeta
        self.floor_cells = float(floor_cells)
        p = symbol_p(zeta, grid.xi)
        floor = zeta.tau * grid.d0 * self.floor_cells
        absp = np.abs(p)
        self.p = p
        self.abs_p = absp
        self.floored = absp < floor
        self.weight = np.where(self.floored, floor, absp)
        self.inhom = absp + zeta.tau
        for a in (self.p, self.abs_p, self.floored, self.weight, self.inhom):
            a.flags.writeable = False

    @cached_property
    def modulation_cells(self):
        m = modulation(self.zeta, self.grid.xi) / self.grid.d0
        m.flags.writeable = False
        return m

    @cached_property
    def divisor(self):
        """``p`` rescaled to magnitude ``weight``; phase 1 where ``p == 0``."""
        phase = np.ones_like(self.p)
        nz = self.abs_p > 0
        phase[nz] = self.p[nz] / self.abs_p[nz]
        d = phase * self.weight
        d.flags.writeable = False
        return d

    @cached_property
    def band_index(self):
        return modulation_band(self.modulation_cells)


# ---------------------------------------------------------------- dyadic helpers


def is_dyadic(lam):
    try:
        v = int(lam)
    except (TypeError, ValueError):
        return False
    return v == lam and v >= 1 and (v & (v - 1)) == 0


def _check_dyadic(lam):
    if not is_dyadic(lam):
        raise ValueError(f"{lam!r} is not a dyadic integer 2^k, k >= 0")
    return int(lam)


def modulation_band(m_cells):
    """Dyadic band label of a modulation (in cells): 1 for ``m <= 1`` else ``2^ceil(log2 m)``."""
    m = np.asarray(m_cells, dtype=float)
    out = np.ones(m.shape, dtype=np.int64)
    big = m > 1
    e = np.ceil(np.log2(m[big])).astype(np.int64)
    lam = np.left_shift(1, e)
    # guard rounding of log2 at exact powers of two
    lam = np.where(m[big] <= lam // 2, lam // 2, lam)
    lam = np.where(m[big] > lam, lam * 2, lam)
    out[big] = lam
    return out


def q_mask(sym, band):
    """Indicator of a modulation band on the grid.

    ``band`` is a dyadic int ``lam`` (``E_lam``), ``("leq", lam)``, ``"low"``
    (bands ``1 <= lam <= tau/8``) or ``"high"`` (the complement).
    """
    b = sym.band_index
    cut = sym.zeta.tau / (8 * sym.grid.d0)
    if isinstance(band, str):
        if band == "low":
            return b <= cut
        if band == "high":
            return b > cut
        raise ValueError(f"unknown band {band!r}")
    if isinstance(band, tuple) and band[0] == "leq":
        lam = _check_dyadic(band[1])
        return sym.modulation_cells <= lam
    lam = _check_dyadic(band)
    return b == lam


def q_projection(f, zeta, band, floor_cells=1.0, sym=None):
    if sym is None:
        sym = GridSymbol(f.grid, zeta, floor_cells)
    return SpectralField(f.grid, f.coeffs * q_mask(sym, band))


# ---------------------------------------------------------------- Littlewood-Paley


def _s(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smoothstep(t):
    """``C^infty`` transition: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    a = _s(t)
    b = _s(1.0 - np.asarray(t, dtype=float))
    return a / (a + b)


def _chi_raw(rho):
    rho = np.asarray(rho, dtype=float)
    return smoothstep(2.0 - rho) * smoothstep(2.0 * rho - 1.0)


def chi(rho):
    """Frozen dyadic bump on ``[1/2, 2]`` normalised so ``sum_k chi(2^-k rho) = 1``."""
    rho = np.asarray(rho, dtype=float)
    out = np.zeros_like(rho)
    pos = rho > 0
    r = rho[pos]
    den = np.zeros_like(r)
    # only k with 2^-k r in (1/2, 2) contribute; shift r into [1, 2) first
    k0 = np.floor(np.log2(r))
    base = r / 2.0**k0
    for j in (-2, -1, 0, 1, 2):
        den += _chi_raw(base * 2.0**j)
    out[pos] = _chi_raw(r) / den
    return out


def lp_cumulative(rho, nu):
    """Symbol of ``P_{<= nu}``: ``1 - sum_{lam > nu} chi(rho/lam)``.

    The dilates sum to one, so this is ``sum_{lam <= nu} chi(rho/lam)``, which is
    ``1 - chi(rho / 2 nu)`` below ``2 nu`` and zero beyond.
    """
    nu = _check_dyadic(nu)
    rho = np.asarray(rho, dtype=float)
    out = np.zeros_like(rho)
    inside = rho < 2 * nu
    out[inside] = 1.0 - chi(rho[inside] / (2 * nu))
    return out


def lp_symbol(rho, lam):
    """``chi_lam(rho)`` for ``lam > 1`` and the collapsed ``chi_1 = P_{<=1}``."""
    lam = _check_dyadic(lam)
    if lam == 1:
        return lp_cumulative(rho, 1)
    return chi(np.asarray(rho, dtype=float) / lam)


def lp_projection(f, lam):
    rho = f.grid.xi_abs / f.grid.d0
    return SpectralField(f.grid, f.coeffs * lp_symbol(rho, lam))


def directional_symbol(grid, omega, band):
    omega = np.asarray(omega, dtype=float)
    if abs(np.linalg.norm(omega) - 1) > 1e-12:
        raise ValueError("omega must be a unit vector")
    rho = np.abs(_dot(omega, grid.xi)) / grid.d0
    if isinstance(band, tuple) and band[0] == "leq":
        return lp_cumulative(rho, band[1])
    return lp_symbol(rho, band)


def directional_projection(f, omega, band):
    """``P^omega_lam`` (``band = lam``) or ``P^omega_{<= nu}`` (``band = ("leq", nu)``)."""
    return SpectralField(f.grid, f.coeffs * directional_symbol(f.grid, omega, band))


def dyadic_range(lo, hi):
    """Dyadic integers ``lam`` with ``lo <= lam <= hi``."""
    out = []
    lam = 1
    while lam <= hi:
        if lam >= lo:
            out.append(lam)
        lam *= 2
    return out

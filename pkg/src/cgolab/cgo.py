"""Schrodinger potentials from conductivities, the inverse of the conjugated
Laplacian, and CGO remainders by Picard iteration.

Everything is kept in the conjugated frame: a CGO solution
``u = exp(x.zeta)(1 + psi)`` is represented only by ``psi`` and ``zeta``; the
exponential factor is never formed on the grid.

On the torus ``Delta_zeta`` is not onto: lattice points on (or within one cell
of) the characteristic sphere, including ``xi = 0``, are divided by the
floored weight instead of ``p``.  The equation is therefore solved exactly on
the off-floor frequencies only; ``CgoSolution.residual`` measures that part and
``CgoSolution.floor_defect`` reports what is left on the floored cells.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import jv, roots_legendre

from .phase import GridSymbol
from .spectral import (
    Field,
    GridMismatchError,
    SpectralField,
    fft_coeffs,
    ifft_values,
    pad_coeffs,
    padded_values,
    product_coeffs,
    resample,
    spectral_gradient,
    spectral_laplacian,
)
from .spaces import weighted_l2

logger = logging.getLogger(__name__)


class EllipticityError(ValueError):
    pass


class ResolutionError(RuntimeError):
    """Two independent evaluations disagree: the grid is too coarse."""


class ContractionError(RuntimeError):
    def __init__(self, msg, ratio, zeta=None):
        super().__init__(msg)
        self.ratio = ratio
        self.zeta = zeta


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Conductivity:
    gamma: Field
    c: float
    support_radius: float
    center: np.ndarray
    support_tol: float = 1e-5
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        g = self.gamma.values
        if np.max(np.abs(g.imag)) > 1e-12:
            raise ValueError("conductivity must be real")
        lo, hi = float(g.real.min()), float(g.real.max())
        if not (0 < self.c <= lo and hi <= 1 / self.c):
            raise EllipticityError(f"need {self.c} <= gamma <= {1 / self.c}, got [{lo}, {hi}]")
        outside = self.distance_from_center() > self.support_radius
        if np.any(outside) and np.max(np.abs(g.real[outside] - 1)) > self.support_tol:
            raise ValueError("gamma - 1 is not supported in the stated ball")

    def distance_from_center(self):
        grid = self.gamma.grid
        d = grid.x - np.asarray(self.center).reshape((-1,) + (1,) * grid.n)
        d = (d + grid.L / 2) % grid.L - grid.L / 2
        return np.sqrt(np.sum(d**2, axis=0))

    @property
    def bounds(self):
        g = self.gamma.values.real
        return float(g.min()), float(g.max())


@dataclass(frozen=True, eq=False)
class PotentialDecomposition:
    q: Field
    f: list
    h: Field
    discrepancy: float


def _real(c):
    # keep fields real where the physics says so; rounding leaves ~1e-17 imag parts
    return ifft_values(c).real.astype(complex)


def schrodinger_potential(cond, tol=1e-8):
    """``q = gamma^{-1/2} Delta gamma^{1/2}`` computed two ways, plus ``q = div f + h``."""
    gamma = cond.gamma
    grid = gamma.grid
    g = gamma.values.real
    xi = grid.xi

    sq = fft_coeffs(np.sqrt(g))
    lap_sq = -grid.xi_sq * sq
    q_direct = product_coeffs(fft_coeffs(1 / np.sqrt(g)), lap_sq)

    lg = fft_coeffs(np.log(g))
    f_coeffs = [0.5j * xi[j] * lg for j in range(grid.n)]
    h = sum(product_coeffs(fj, fj) for fj in f_coeffs)
    div_f = sum(1j * xi[j] * f_coeffs[j] for j in range(grid.n))
    q = div_f + h

    scale = np.linalg.norm(q.ravel())
    err = np.linalg.norm((q - q_direct).ravel())
    disc = float(err / scale) if scale > 0 else float(err)
    if disc > tol:
        raise ResolutionError(f"q formulas disagree by {disc:.2e} (> {tol:.0e}); refine the grid")
    return PotentialDecomposition(
        q=Field(grid, _real(q)),
        f=[Field(grid, _real(c)) for c in f_coeffs],
        h=Field(grid, _real(h)),
        discrepancy=disc,
    )


# ---------------------------------------------------------------- mollifier

_GL_NODES, _GL_WEIGHTS = roots_legendre(400)


def _bump(r):
    out = np.zeros_like(r)
    inside = r < 1
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def bump_hat(k, n):
    """Fourier transform of the unit-mass bump ``C exp(-1/(1-|x|^2))`` at radial frequency ``k``."""
    k = np.asarray(k, dtype=float)
    r = 0.5 * (_GL_NODES + 1.0)
    w = 0.5 * _GL_WEIGHTS
    phi = _bump(r)
    nu = n / 2 - 1
    mass = np.sum(w * phi * r ** (n - 1))
    flat = k.ravel()
    out = np.ones_like(flat)
    nz = flat > 1e-12
    kr = np.multiply.outer(flat[nz], r)
    # radial Hankel transform normalised by the mass: Gamma(n/2) (2/kr)^nu J_nu(kr)
    kern = gamma_fn(n / 2) * (2.0 / kr) ** nu * jv(nu, kr)
    out[nz] = (kern * (w * phi * r ** (n - 1))).sum(axis=1) / mass
    return out.reshape(k.shape)


def mollify(f, eps):
    """``f * phi_eps`` (periodised), applied as the multiplier ``phi_hat(eps xi)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    grid = f.grid
    rho = grid.xi_abs * eps
    uniq, inv = np.unique(np.round(rho, 12), return_inverse=True)
    mult = bump_hat(uniq, grid.n)[inv].reshape(grid.shape)
    return Field(grid, ifft_values(fft_coeffs(f.values) * mult))


# ---------------------------------------------------------------- Delta_zeta


def apply_delta_zeta(psi, zeta):
    """``Delta psi + 2 zeta.grad psi`` as the multiplier ``p_zeta``."""
    sym = GridSymbol(psi.grid, zeta)
    return Field(psi.grid, ifft_values(sym.p * fft_coeffs(psi.values)))


def apply_inverse_delta_zeta(g, zeta, floor_cells=1.0, sym=None):
    """Right inverse of ``Delta_zeta`` with floored divisor.

    Returns ``(field, floored_fraction)`` where ``floored_fraction`` is the share
    of ``||g||_2^2`` sitting on floored cells.
    """
    if sym is None:
        sym = GridSymbol(g.grid, zeta, floor_cells)
    c = fft_coeffs(g.values)
    energy = np.sum(np.abs(c) ** 2)
    frac = float(np.sum(np.abs(c[sym.floored]) ** 2) / energy) if energy > 0 else 0.0
    return Field(g.grid, ifft_values(c / sym.divisor)), frac


def carleman_ratio(g, zeta, floor_cells=1.0):
    """``||Delta_zeta^{-1} g||_{Xdot^{1/2}} / ||g||_{Xdot^{-1/2}}`` with matched floored weights."""
    sym = GridSymbol(g.grid, zeta, floor_cells)
    psi, _ = apply_inverse_delta_zeta(g, zeta, floor_cells, sym)
    num = weighted_l2(SpectralField(g.grid, fft_coeffs(psi.values)), np.sqrt(sym.weight))
    den = weighted_l2(SpectralField(g.grid, fft_coeffs(g.values)), 1 / np.sqrt(sym.weight))
    return num / den


def conjugation_defect(w, zeta):
    """Relative gap between the multiplier ``p_zeta`` and ``Delta + 2 zeta.grad`` from spectral derivatives."""
    a = apply_delta_zeta(w, zeta).values
    grad = spectral_gradient(w)
    b = spectral_laplacian(w).values + 2 * sum(z * d.values for z, d in zip(zeta.zeta, grad))
    scale = np.max(np.abs(a))
    return float(np.max(np.abs(a - b)) / scale) if scale > 0 else float(np.max(np.abs(b)))


@dataclass(eq=False)
class CgoSolution:
    zeta: object
    psi: Field
    residual: float
    ratios: list = field(default_factory=list)
    iterations: int = 0
    floor_defect: float = 0.0
    floor_cells: float = 1.0

    def norm(self, homogeneous=True):
        sym = GridSymbol(self.psi.grid, self.zeta, self.floor_cells)
        w = sym.weight if homogeneous else sym.inhom
        return weighted_l2(SpectralField(self.psi.grid, fft_coeffs(self.psi.values)), np.sqrt(w))


def cgo_residual(q, psi, zeta, floor_cells=1.0):
    """``(off-floor, floored)`` L^2 norms of ``Delta_zeta psi - q(1+psi)``."""
    if q.grid != psi.grid:
        raise GridMismatchError("q and psi live on different grids")
    sym = GridSymbol(psi.grid, zeta, floor_cells)
    pc = fft_coeffs(psi.values)
    qc = fft_coeffs(q.values)
    one = np.zeros_like(pc)
    one.flat[0] = 1.0
    r = sym.p * pc - product_coeffs(qc, one + pc)
    vol = np.sqrt(psi.grid.volume)
    off = float(vol * np.linalg.norm(r[~sym.floored]))
    on = float(vol * np.linalg.norm(r[sym.floored]))
    return off, on


def verify_residual(q, sol, factor=2):
    """Residual of ``sol`` re-evaluated after band-limited refinement by ``factor``."""
    fine = q.grid.refine(factor)
    return cgo_residual(resample(q, fine), resample(sol.psi, fine), sol.zeta, sol.floor_cells)


def solve_cgo(q, zeta, tol=1e-10, max_iter=200, floor_cells=1.0):
    """Picard iteration ``psi <- Delta_zeta^{-1}(q (1 + psi))`` from ``psi = 0``."""
    grid = q.grid
    sym = GridSymbol(grid, zeta, floor_cells)
    qc = fft_coeffs(q.values)
    if not np.any(qc):
        return CgoSolution(zeta, Field(grid, np.zeros(grid.shape)), 0.0, [], 0, 0.0, floor_cells)
    half = np.sqrt(sym.weight)
    vol = np.sqrt(grid.volume)
    q_big = padded_values(qc)

    def xnorm(c):
        return vol * np.linalg.norm((half * c).ravel())

    pc = np.zeros(grid.shape, dtype=complex)
    rhs = qc.copy()  # q (1 + 0)
    ratios = []
    first = None
    prev_step = None
    bad = 0
    for it in range(1, max_iter + 1):
        new = rhs / sym.divisor
        step = xnorm(new - pc)
        pc = new
        if first is None:
            first = step
        if prev_step is not None and prev_step > 0:
            rho = step / prev_step
            ratios.append(float(rho))
            bad = bad + 1 if rho >= 1 else 0
            if bad >= 3:
                raise ContractionError(
                    f"Picard ratio >= 1 for 3 steps (last {rho:.3f})", ratio=float(rho), zeta=zeta
                )
        prev_step = step
        one_plus = pc.copy()
        one_plus.flat[0] += 1.0
        rhs_new = product_coeffs(q_big, one_plus)
        # off-floor residual of the current iterate is rhs_old - rhs_new there
        res = vol * np.linalg.norm((rhs - rhs_new)[~sym.floored])
        rhs = rhs_new
        if step <= tol * first or res <= tol:
            break
    else:
        raise ConvergenceError(f"no convergence in {max_iter} iterations")
    psi = Field(grid, ifft_values(pc))
    off, on = cgo_residual(q, psi, zeta, floor_cells)
    logger.debug("cgo: %d iterations, residual %.2e, floor defect %.2e", it, off, on)
    return CgoSolution(zeta, psi, off, ratios, it, on, floor_cells)


# ---------------------------------------------------------------- pairings


def _triple_coeff(fields, k):
    """Coefficient at ``-k`` of the product of ``fields``, exact for band-limited inputs."""
    grid = fields[0].grid
    M = 2 * grid.N
    prod = np.ones((M,) * grid.n, dtype=complex)
    for f in fields:
        if f.grid != grid:
            raise GridMismatchError("pairing inputs live on different grids")
        prod = prod * ifft_values(pad_coeffs(fft_coeffs(f.values), M))
    c = fft_coeffs(prod)
    idx = grid.lattice_index(-np.asarray(k, dtype=float))
    # lattice_index is for the N grid; translate to the M grid
    m = [i if i < grid.N // 2 else i - grid.N for i in idx]
    return c[tuple(v % M for v in m)]


def pairing(q, k, psi1, psi2):
    """Unconjugated ``int q exp(i k.x) (1+psi1)(1+psi2) dx``."""
    grid = q.grid
    grid.lattice_index(k)
    one = Field(grid, np.ones(grid.shape))
    a = Field(grid, one.values + psi1.values)
    b = Field(grid, one.values + psi2.values)
    return complex(grid.volume * _triple_coeff([q, a, b], k))


def pairing_terms(q, k, psi1, psi2):
    """The three pieces of :func:`pairing`: leading, linear in psi, bilinear in psi."""
    grid = q.grid
    grid.lattice_index(k)
    V = grid.volume
    lead = V * _triple_coeff([q], k)
    lin = V * (_triple_coeff([q, psi1], k) + _triple_coeff([q, psi2], k))
    bil = V * _triple_coeff([q, psi1, psi2], k)
    return complex(lead), complex(lin), complex(bil)

"""Operator norms between X-type spaces by power iteration on the normal operator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..phase import GridSymbol, PhaseVector, directional_symbol, dyadic_range, lp_symbol, smoothstep
from ..rng import as_generator
from ..spectral import Field, SpectralField, fft_coeffs, ifft_values, lp_norm, padded_values, product_coeffs
from .report import EstimateReport

STAGNATION = 1e-4


@dataclass
class PowerResult:
    value: float
    converged: bool
    iterations: int
    history: list


def power_norm(apply, adjoint, x0, max_iter=100, stagnation=STAGNATION):
    """Largest singular value of ``apply`` from ``||A x|| / ||x||`` along ``x <- A*A x``."""
    x = x0 / np.linalg.norm(x0)
    hist = []
    for it in range(1, max_iter + 1):
        y = apply(x)
        sigma = float(np.linalg.norm(y))
        hist.append(sigma)
        if sigma == 0:
            return PowerResult(0.0, True, it, hist)
        z = adjoint(y)
        nz = np.linalg.norm(z)
        if nz == 0:
            return PowerResult(sigma, True, it, hist)
        x = z / nz
        if it > 1 and abs(hist[-1] - hist[-2]) <= stagnation * hist[-1]:
            return PowerResult(sigma, True, it, hist)
    return PowerResult(hist[-1], False, max_iter, hist)


def _as_coeffs(f):
    if isinstance(f, SpectralField):
        return f.coeffs
    return fft_coeffs(f.values)


def multiplier(f, mode):
    """Coefficients of the multiplying function: ``f`` itself or ``div f``."""
    if mode == "mf":
        if isinstance(f, (list, tuple)):
            raise ValueError("mode 'mf' takes a scalar field")
        return _as_coeffs(f)
    if mode == "m_grad_f":
        if not isinstance(f, (list, tuple)):
            raise ValueError("mode 'm_grad_f' takes a vector field (list of components)")
        grid = f[0].grid
        return sum(1j * grid.xi[j] * _as_coeffs(fj) for j, fj in enumerate(f))
    raise ValueError(f"unknown mode {mode!r}")


def sandwich_norm(m, left, right, rng, trials=1, max_iter=100):
    """``|| left * P(m * (right * .)) ||`` over coefficient arrays; best of ``trials`` starts."""
    mb = padded_values(m)
    mcb = padded_values(np.conj(_flip(m)))

    def A(x):
        return left * product_coeffs(mb, right * x)

    def At(y):
        return right * product_coeffs(mcb, left * y)

    best = None
    for _ in range(trials):
        x0 = rng.standard_normal(m.shape) + 1j * rng.standard_normal(m.shape)
        r = power_norm(A, At, x0, max_iter=max_iter)
        if best is None or r.value > best.value:
            best = r
    return best


def _flip(c):
    # coefficients of conj(f) are conj(c(-k)); the adjoint multiplies by conj(f)
    idx = tuple((-np.arange(s)) % s for s in c.shape)
    return c[np.ix_(*idx)]


def bilinear_norm(f, zeta, mode="mf", trials=1, rng=None, homogeneous=False, max_iter=100):
    """``||m||_{X^{1/2} -> X^{-1/2}}`` for multiplication by ``f`` (or ``div f``).

    If power iteration does not settle, ``interval`` is ``(estimate, ||m||_inf / tau)``.
    """
    rng = as_generator(rng)
    m = multiplier(f, mode)
    grid = (f[0] if isinstance(f, (list, tuple)) else f).grid
    sym = GridSymbol(grid, zeta)
    w = sym.weight if homogeneous else sym.inhom
    floor = zeta.tau * (grid.d0 if homogeneous else 1.0)
    m_inf = float(np.abs(ifft_values(m)).max())
    bound = m_inf / floor
    if not np.any(m):
        return EstimateReport("bilinear_norm", {"tau": zeta.tau, "mode": mode}, 0.0, max(trials, 1),
                              extra={"linf_bound": 0.0, "converged": 1})
    r = sandwich_norm(m, w**-0.5, w**-0.5, rng, trials, max_iter)
    return EstimateReport(
        quantity="bilinear_norm",
        params={"tau": zeta.tau, "mode": mode, "homogeneous": homogeneous},
        value=r.value,
        samples=trials,
        dispersion=abs(r.history[-1] - r.history[-2]) if len(r.history) > 1 else 0.0,
        extra={"linf_bound": bound, "converged": int(r.converged), "iterations": r.iterations},
        interval=None if r.converged else (r.value, bound),
    )


def vector_lp(fields, p):
    """``|| |f| ||_p`` for a vector field given as a list of Fields."""
    grid = fields[0].grid
    mag = np.sqrt(sum(np.abs(fj.values) ** 2 for fj in fields))
    return lp_norm(Field(grid, mag), p)


def gradient_multiplier_rhs(f, zeta, s, p, beta=1 / 6):
    """``||f||_n + sup_{nu <= lam <= 100 tau} (lam/tau)^beta (lam/nu)^{1/p} lam^{s-1} ||P_lam P^{e1}_{<= 8 nu} f||_p``.

    ``f`` is a vector field; scales are in cells and ``P^{e1}`` uses the first
    frame vector of ``zeta``.
    """
    grid = f[0].grid
    tau_c = zeta.tau / grid.d0
    rho = grid.xi_abs / grid.d0
    coeffs = [_as_coeffs(fj) for fj in f]
    top = min(100 * tau_c, 2 * rho.max())
    best = 0.0
    for lam in dyadic_range(1, top):
        pl = lp_symbol(rho, lam)
        for nu in dyadic_range(1, lam):
            d = directional_symbol(grid, zeta.e1, ("leq", 8 * nu))
            parts = [Field(grid, ifft_values(c * pl * d)) for c in coeffs]
            val = (lam / tau_c) ** beta * (lam / nu) ** (1 / p) * lam ** (s - 1) * vector_lp(parts, p)
            best = max(best, val)
    return vector_lp(f, grid.n) + best


# ---------------------------------------------------------------- localization


@dataclass(frozen=True)
class PhiSpec:
    """Cut-off equal to 1 on the ball of ``radius`` and 0 beyond ``radius + width``."""

    radius: float
    width: float
    center: tuple = None

    def field(self, grid):
        c = grid.center() if self.center is None else np.asarray(self.center, dtype=float)
        d = grid.x - c.reshape((-1,) + (1,) * grid.n)
        d = (d + grid.L / 2) % grid.L - grid.L / 2
        r = np.sqrt(np.sum(d**2, axis=0))
        return Field(grid, smoothstep((self.radius + self.width - r) / self.width))


def _phi_field(phi, grid):
    if isinstance(phi, Field):
        return phi
    if isinstance(phi, PhiSpec):
        return phi.field(grid)
    raise TypeError("phi must be a PhiSpec or Field")


def localization_ratio(u, phi, zeta, grid=None):
    """``||phi u||_{X^{1/2}} / ||u||_{Xdot^{1/2}}`` for one given ``u``."""
    grid = u.grid
    phi = _phi_field(phi, grid)
    sym = GridSymbol(grid, zeta)
    uc = _as_coeffs(u)
    pu = product_coeffs(fft_coeffs(phi.values), uc)
    return float(np.linalg.norm(np.sqrt(sym.inhom) * pu) / np.linalg.norm(np.sqrt(sym.weight) * uc))


def verify_localization(phi, zeta, trials, rng=None, grid=None, weights="mixed", max_iter=100):
    """Constants of ``u -> phi u`` as ``Xdot^{1/2} -> X^{1/2}`` (forward) and ``X^{-1/2} -> Xdot^{-1/2}`` (dual).

    ``weights="matched"`` uses the floored homogeneous weight on both sides, so
    ``phi = 1`` gives exactly 1.
    """
    if grid is None:
        grid = phi.grid
    rng = as_generator(rng)
    m = fft_coeffs(_phi_field(phi, grid).values)
    sym = GridSymbol(grid, zeta)
    hom = sym.weight
    inh = sym.inhom if weights == "mixed" else sym.weight
    if weights not in ("mixed", "matched"):
        raise ValueError(f"unknown weights {weights!r}")
    loc = sandwich_norm(m, inh**0.5, hom**-0.5, rng, trials, max_iter)
    dual = sandwich_norm(m, hom**-0.5, inh**0.5, rng, trials, max_iter)
    return EstimateReport(
        quantity="localization_constant",
        params={"tau": zeta.tau, "weights": weights},
        value=max(loc.value, dual.value),
        samples=trials,
        dispersion=0.0,
        extra={"forward": loc.value, "dual": dual.value,
               "converged": int(loc.converged and dual.converged)},
        gate="artifact-chosen",
    )


# ---------------------------------------------------------------- zeta stability


def _as_phase(z):
    if isinstance(z, PhaseVector):
        return z
    return PhaseVector.from_complex(z)


def verify_zeta_stability(zeta, zeta_tilde, trials, rng=None, grid=None):
    """Equivalence constants of ``X^b_zeta`` and ``X^b_zeta~`` for ``b = +-1/2``.

    The exact constant is the sup over the lattice of the weight ratio; random
    fields give lower bounds that must not exceed it.
    """
    if grid is None:
        raise ValueError("grid is required")
    z = _as_phase(zeta)
    zt = _as_phase(zeta_tilde)
    rng = as_generator(rng)
    a = GridSymbol(grid, z).inhom
    b = GridSymbol(grid, zt).inhom
    ratio = a / b
    c_plus = float(np.sqrt(ratio.max()))  # b = +1/2
    c_minus = float(np.sqrt((1 / ratio).max()))  # b = -1/2
    mc = 0.0
    for _ in range(trials):
        c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        e = np.abs(c) ** 2
        mc = max(mc, np.sqrt(np.sum(a * e) / np.sum(b * e)), np.sqrt(np.sum(e / a) / np.sum(e / b)))
    dist = float(np.linalg.norm(z.zeta - zt.zeta))
    return EstimateReport(
        quantity="zeta_stability",
        params={"tau": z.tau, "tau_tilde": zt.tau},
        value=max(c_plus, c_minus),
        samples=max(trials, 1),
        dispersion=0.0,
        extra={"c_plus": c_plus, "c_minus": c_minus, "monte_carlo": float(mc), "distance": dist,
               "bound": 4 * (1 + dist) ** 0.5},
        gate="4 (1 + |zeta - zeta~|)^{1/2}",
    )

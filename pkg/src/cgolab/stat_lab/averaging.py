"""Monte-Carlo checks of the averaging bounds over ``O(n)`` (and over tau).

Both estimators only ever touch the support of the input spectrum, so each
Haar sample costs a few vector operations rather than a grid transform (the
``p != 2`` branch of :func:`plane_avg` is the exception).
"""
from __future__ import annotations

import numpy as np

from ..phase import PhaseVector, _check_dyadic, lp_cumulative, lp_symbol, symbol_p
from ..rng import as_generator
from ..spectral import SpectralField, forward_transform, lp_norm
from .haar import sample_haar
from .report import EstimateReport


class NyquistError(ValueError):
    pass


def _coeffs(f):
    return f if isinstance(f, SpectralField) else forward_transform(f)


def plane_avg(f, lam, nu, p, samples, rng=None):
    """``||A_{lam,nu}||_{L^p(O(n))} / ||f||_p`` with
    ``A(U) = (lam/nu)^{1/p} ||P_lam P^{U e1}_{<= nu} f||_p``.

    ``extra["raw"]`` is the same average without the ``(lam/nu)^{1/p}`` factor
    (the quantity whose decay in ``nu/lam`` the slope fit looks at).
    """
    lam = _check_dyadic(lam)
    nu = _check_dyadic(nu)
    if nu > lam:
        raise ValueError(f"need nu <= lam, got nu={nu}, lam={lam}")
    p = float(p)
    if not p >= 2:
        raise ValueError("p must lie in [2, inf]")
    rng = as_generator(rng)
    g = _coeffs(f)
    grid = g.grid
    rho = grid.xi_abs / grid.d0
    a = g.coeffs * lp_symbol(rho, lam)
    support = np.nonzero(a)
    xi_s = grid.xi[(slice(None),) + support]
    a_s = a[support]
    fnorm = lp_norm(g, p)
    if fnorm == 0:
        raise ValueError("f is zero")

    vals = np.empty(samples)
    for i in range(samples):
        w = sample_haar(grid.n, rng).U[:, 0]
        m = lp_cumulative(np.abs(w @ xi_s) / grid.d0, nu)
        if p == 2:
            vals[i] = np.sqrt(grid.volume) * np.linalg.norm(m * a_s)
        else:
            c = np.zeros(grid.shape, dtype=complex)
            c[support] = m * a_s
            vals[i] = lp_norm(SpectralField(grid, c), p)

    if np.isinf(p):
        raw = float(vals.max())
        factor = 1.0
        disp = 0.0
    else:
        raw = float(np.mean(vals**p) ** (1 / p))
        factor = (lam / nu) ** (1 / p)
        disp = float(np.std(vals**p) / np.sqrt(samples)) / max(raw ** (p - 1) * p, 1e-300)
    return EstimateReport(
        quantity="planeavg_ratio",
        params={"lam": lam, "nu": nu, "p": p},
        value=factor * raw / fnorm,
        samples=samples,
        dispersion=factor * disp / fnorm,
        extra={"raw": raw / fnorm, "f_norm": fnorm},
    )


def _weight_stats(zeta_tau, U, xi_s, d0, floor_cells):
    z = PhaseVector(zeta_tau, U[:, 0], U[:, 1])
    return np.maximum(np.abs(symbol_p(z, xi_s)), zeta_tau * d0 * floor_cells)


def qavg_rhs(f, M):
    """``||P_{>=100M} f||^2_{Hdot^-1} + M^-1 ||P_{<100M} f||^2_{Hdot^-1/2}`` (sharp cut at ``100 M``)."""
    g = _coeffs(f)
    grid = g.grid
    r = np.maximum(grid.xi_abs, grid.d0)
    e = grid.volume * np.abs(g.coeffs) ** 2
    hi = grid.xi_abs >= 100 * M
    return float(np.sum(e[hi] / r[hi] ** 2) + np.sum(e[~hi] / r[~hi]) / M)


def avg_qnorm(f, M, samples, rng=None, floor_cells=1.0):
    """Average of ``||f||^2_{Xdot^{-1/2}_{zeta(tau,U)}}`` over ``tau ~ U[M, 2M]`` and Haar ``U``."""
    g = _coeffs(f)
    grid = g.grid
    if M < 4 * grid.d0:
        raise ValueError(f"M must be >= 4 cells ({4 * grid.d0}), got {M}")
    if 2 * M > grid.xi_max:
        raise NyquistError(f"2M = {2 * M} exceeds the Nyquist bound {grid.xi_max}")
    rng = as_generator(rng)
    support = np.nonzero(g.coeffs)
    xi_s = grid.xi[(slice(None),) + support]
    e = grid.volume * np.abs(g.coeffs[support]) ** 2
    vals = np.empty(samples)
    for i in range(samples):
        tau = rng.uniform(M, 2 * M)
        U = sample_haar(grid.n, rng).U
        vals[i] = np.sum(e / _weight_stats(tau, U, xi_s, grid.d0, floor_cells))
    lhs = float(vals.mean())
    rhs = qavg_rhs(g, M)
    return EstimateReport(
        quantity="qavg_constant",
        params={"M": M, "floor_cells": floor_cells},
        value=lhs / rhs if rhs > 0 else 0.0,
        samples=samples,
        dispersion=float(vals.std() / np.sqrt(samples)) / rhs if rhs > 0 else 0.0,
        extra={"lhs": lhs, "rhs": rhs},
    )


def qavg_quadrature(xi_norm, M, d0=1.0, floor_cells=1.0, n_theta=400, n_phi=400, n_tau=24):
    """Dense quadrature of ``E[1 / max(|p|, tau d0)]`` for one frequency of length ``xi_norm``, n = 3.

    With ``v = U^T xi/|xi|`` uniform on the sphere, ``|p| = |-|xi|^2 + 2 tau |xi| v2 + 2i tau |xi| v1|``.
    """
    from scipy.special import roots_legendre

    ct, wt = roots_legendre(n_theta)
    tt, wtau = roots_legendre(n_tau)
    phi = (np.arange(n_phi) + 0.5) * 2 * np.pi / n_phi
    st = np.sqrt(1 - ct**2)
    v1 = st[:, None] * np.cos(phi)[None, :]
    v2 = st[:, None] * np.sin(phi)[None, :]
    total = 0.0
    for t, wt_ in zip(M * (1.5 + 0.5 * tt), 0.5 * wtau):
        p = np.hypot(-(xi_norm**2) + 2 * t * xi_norm * v2, 2 * t * xi_norm * v1)
        w = np.maximum(p, t * d0 * floor_cells)
        # uniform measure: d(cos theta) d(phi) / (4 pi)
        total += wt_ * np.sum(wt[:, None] / w) * (2 * np.pi / n_phi) / (4 * np.pi)
    return float(total)

"""Scalar check of the dyadic-sum bounds behind the bilinear estimate.

With ``B[mu, nu] = tau^{-(1-th)/n - th/2 - 1/2} mu^{(1-th)/n - th/2} nu^{-1/2}``
the two sums are bilinear forms in the band norms ``(||Q_mu u||, ||Q_nu v||)``.
Their sharp constant is the l^2 operator norm of the kernel restricted to
``mu <= nu <= tau/8`` (and ``nu < lam`` or ``nu >= lam``), normalised by the
claimed right-hand side.  Everything is exact arithmetic on a few dozen
dyadic scales.
"""
from __future__ import annotations

import numpy as np

from .report import EstimateReport


class ParameterRangeError(ValueError):
    pass


def exponent_pair(n, theta):
    """``(s, p)`` attached to ``(n, theta)``."""
    if n in (3, 4):
        if theta != 0:
            raise ParameterRangeError(f"n={n} uses theta = 0, got {theta}")
        return 1.0, float(n)
    if n in (5, 6):
        if not 0 <= theta < 1:
            raise ParameterRangeError(f"theta must lie in [0, 1), got {theta}")
        return 1 + (1 - theta) * (0.5 - 2 / n), n / (1 - theta)
    raise ParameterRangeError(f"n must be 3, 4, 5 or 6, got {n}")


def default_alphas(n, theta):
    """Exponents the summation argument yields for the two sums."""
    a = (1 - theta) / n
    b = a - theta / 2
    if n == 3:
        leq = 2 / 3
    elif n == 4:
        leq = 3 / 4
    else:
        leq = a + theta / 2 + 0.5
    geq = a + (1 + theta) / 2 if b > 0 else a + theta / 2
    return leq, geq


def _dyadics(hi):
    out = []
    v = 1.0
    while v <= hi:
        out.append(v)
        v *= 2
    return np.array(out)


def kernel(n, theta, tau, mus, nus):
    a = (1 - theta) / n
    return tau ** (-a - theta / 2 - 0.5) * np.power.outer(mus, a - theta / 2) * np.power.outer(np.ones_like(mus), nus) ** -0.5


def sum_constants(n, theta, tau, alpha_leq, alpha_geq):
    """Sharp constants of both sums for one tau; also the per-lam values of the leq norm."""
    s, _ = exponent_pair(n, theta)
    a = (1 - theta) / n
    nus = _dyadics(tau / 8)
    if nus.size == 0:
        raise ParameterRangeError(f"tau = {tau} leaves no band below tau/8")
    MU, NU = np.meshgrid(nus, nus, indexing="ij")
    B = tau ** (-a - theta / 2 - 0.5) * MU ** (a - theta / 2) * NU**-0.5
    tri = MU <= NU
    c_leq = c_geq = 0.0
    per_lam = {}
    for lam in _dyadics(100 * tau):
        K = np.where(tri & (NU < lam), (NU / lam) ** a * B, 0.0)
        if K.any():
            op = np.linalg.norm(K, 2)
            per_lam[lam] = op
            c_leq = max(c_leq, op / ((lam / tau) ** alpha_leq * lam ** (s - 2)))
        K = np.where(tri & (NU >= lam), B, 0.0)
        if K.any():
            c_geq = max(c_geq, np.linalg.norm(K, 2) / (lam**-1 * (lam / tau) ** alpha_geq))
    return c_leq, c_geq, per_lam


def fitted_alpha(n, theta, tau):
    """Slope of ``log(||K_lam|| lam^{2-s})`` against ``log(lam/tau)`` over ``tau/8 <= lam <= 100 tau``."""
    s, _ = exponent_pair(n, theta)
    _, _, per_lam = sum_constants(n, theta, tau, 0.0, 0.0)
    lams = np.array([lam for lam in per_lam if lam >= tau / 8])
    y = np.log([per_lam[lam] * lam ** (2 - s) for lam in lams])
    return float(np.polyfit(np.log(lams / tau), y, 1)[0])


def verify_dyadic_sums(n, s, p, theta, tau_range, alpha_leq=None, alpha_geq=None):
    """Constants of both sums across ``tau_range``; ``value`` is the larger relative variation."""
    s0, p0 = exponent_pair(n, theta)
    if abs(s - s0) > 1e-12 or abs(p - p0) > 1e-12:
        raise ParameterRangeError(f"(s, p) = ({s}, {p}) does not match ({s0}, {p0}) for n={n}, theta={theta}")
    dl, dg = default_alphas(n, theta)
    alpha_leq = dl if alpha_leq is None else alpha_leq
    alpha_geq = dg if alpha_geq is None else alpha_geq
    taus = list(tau_range)
    cl, cg = [], []
    for tau in taus:
        a, b, _ = sum_constants(n, theta, tau, alpha_leq, alpha_geq)
        cl.append(a)
        cg.append(b)
    cl, cg = np.array(cl), np.array(cg)

    def spread(c):
        return float((c.max() - c.min()) / c.max())

    extra = {
        "alpha_leq": alpha_leq,
        "alpha_geq": alpha_geq,
        "leq_constant": float(cl.max()),
        "geq_constant": float(cg.max()),
        "leq_variation": spread(cl),
        "geq_variation": spread(cg),
        "fitted_alpha": fitted_alpha(n, theta, taus[-1]),
    }
    return EstimateReport(
        quantity="dyadic_variation",
        params={"n": n, "theta": theta, "s": s, "p": p, "taus": tuple(taus)},
        value=max(extra["leq_variation"], extra["geq_variation"]),
        samples=len(taus),
        dispersion=0.0,
        extra=extra,
    )

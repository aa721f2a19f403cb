"""Norms used throughout: Bourgain-type ``X^b`` / ``Xdot^b`` spaces attached to
a phase vector, ``H^s_tau``, homogeneous Sobolev norms and a dyadic Besov
surrogate for ``W^{s,p}``.

Every coefficient-side norm carries the factor ``sqrt(L^n)`` so that at
exponent zero it coincides with the quadrature ``L^2`` norm of the field.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .phase import GridSymbol, PhaseVector, dyadic_range, lp_projection
from .spectral import Field, SpectralField, forward_transform, lp_norm

KINDS = ("x_inhom", "x_hom", "h_tau", "lp", "besov_sp")


@dataclass(frozen=True)
class NormSpec:
    kind: str
    exponent: float = 0.0
    p: float = 2.0
    zeta: Optional[PhaseVector] = None
    tau: Optional[float] = None
    floor_cells: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind in ("x_inhom", "x_hom") and self.zeta is None:
            raise ValueError(f"{self.kind} needs a phase vector")
        if self.kind == "h_tau" and not (self.tau and self.tau > 0):
            raise ValueError("h_tau needs tau > 0")

    def __call__(self, f):
        if self.kind == "x_inhom":
            return x_norm(_spec(f), self.zeta, self.exponent, homogeneous=False)
        if self.kind == "x_hom":
            return x_norm(_spec(f), self.zeta, self.exponent, True, self.floor_cells)
        if self.kind == "h_tau":
            return h_tau_norm(_spec(f), self.exponent, self.tau)
        if self.kind == "lp":
            return lp_norm(f, self.p)
        return besov_sp_norm(_field(f), self.exponent, self.p)


def _spec(f):
    return forward_transform(f) if isinstance(f, Field) else f


def _field(f):
    from .spectral import inverse_transform

    return inverse_transform(f) if isinstance(f, SpectralField) else f


def weighted_l2(g, weight):
    return float(np.sqrt(g.grid.volume) * np.linalg.norm((weight * g.coeffs).ravel()))


def x_weight(sym, b, homogeneous):
    base = sym.weight if homogeneous else sym.inhom
    return base**b


def x_norm(f, zeta, b, homogeneous=False, floor_cells=1.0, sym=None):
    """``||w^b f_hat||`` with ``w = |p|+tau`` or the floored ``max(|p|, tau d0)``."""
    if sym is None:
        sym = GridSymbol(f.grid, zeta, floor_cells)
    return weighted_l2(f, x_weight(sym, b, homogeneous))


def h_tau_norm(f, s, tau):
    if not tau > 0:
        raise ValueError("tau must be positive")
    return weighted_l2(f, (f.grid.xi_sq + tau**2) ** (s / 2))


def hdot_norm(f, s):
    """Homogeneous ``Hdot^s``; ``|xi|`` is floored at one cell so the zero mode stays finite."""
    r = np.maximum(f.grid.xi_abs, f.grid.d0)
    return weighted_l2(f, r**s)


def besov_sp_norm(f, s, p):
    """Dyadic surrogate ``(sum_lam [lam^s ||P_lam f||_p]^p)^{1/p}``, lam in cell units."""
    p = float(p)
    if not (1 <= p < np.inf):
        raise ValueError("p must lie in [1, inf)")
    g = forward_transform(f)
    top = 4 * float(f.grid.xi_abs.max() / f.grid.d0) + 1
    total = 0.0
    for lam in dyadic_range(1, top):
        piece = lp_projection(g, lam)
        if not np.any(piece.coeffs):
            continue
        total += (lam**s * lp_norm(piece, p)) ** p
    return float(total ** (1.0 / p))


def besov_profile(f, p, lams=None):
    """``||P_lam f||_p`` for each dyadic lam (used for slope fits)."""
    g = forward_transform(f)
    if lams is None:
        lams = dyadic_range(1, 4 * float(f.grid.xi_abs.max() / f.grid.d0) + 1)
    return {lam: lp_norm(lp_projection(g, lam), p) for lam in lams}

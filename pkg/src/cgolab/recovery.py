"""Fourier-coefficient recovery from pairs of CGO solutions.

A tilted pair ``zt1 + zt2 = i k`` turns the product of the two exponential
factors into ``exp(i k.x)``, so pairing ``q`` against ``(1+psi1)(1+psi2)``
returns ``q_hat`` at ``-k`` up to the terms linear and bilinear in ``psi``.

Sign convention, fixed once here: ``qhat_true(k) = (1/V) int q exp(i k.x) dx``,
which is the transform coefficient at ``-k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cgo import Conductivity, EllipticityError, pairing, pairing_terms, schrodinger_potential, solve_cgo
from .fields import rough_series
from .phase import PhaseVector, smoothstep
from .rng import as_generator
from .spaces import besov_profile, besov_sp_norm, x_norm
from .spectral import (
    Field,
    forward_transform,
    integrate,
    resample,
    spectral_gradient,
)
from .stat_lab.averaging import NyquistError
from .stat_lab.haar import OrthogonalSample, RejectionError, sample_haar
from .stat_lab.operators import bilinear_norm

SNAP = 2.0**-40
MIN_GAMMA = 0.2


# ---------------------------------------------------------------- conductivities


@dataclass(frozen=True)
class Bump:
    offset: tuple
    amplitude: float
    width: float


@dataclass(frozen=True)
class ConductivitySpec:
    """``kind`` is ``"none"``, ``"bumps"`` or ``"rough"``.

    Bumps are Gaussians ``a exp(-|x - c - offset|^2 / width^2)``.  The rough
    mode sets ``log gamma`` to a dyadic series with ``||P_lam log gamma||_p``
    proportional to ``lam^-s``, windowed to the support ball.
    """

    kind: str = "none"
    bumps: tuple = ()
    s: float = 1.0
    p: float = 3.0
    amplitude: float = 0.1
    support_radius: float = None
    seed: int = 0


def parse_conductivity(text):
    """``none`` | ``bumps: dx dy dz amplitude width; ...`` | ``rough: s p amplitude [seed]``."""
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind == "none":
        return ConductivitySpec("none")
    if kind == "bumps":
        bumps = []
        for item in rest.split(";"):
            vals = [float(v) for v in item.split()]
            if not vals:
                continue
            if len(vals) < 3:
                raise ValueError(f"bump {item.strip()!r} needs offset, amplitude and width")
            bumps.append(Bump(tuple(vals[:-2]), vals[-2], vals[-1]))
        return ConductivitySpec("bumps", tuple(bumps))
    if kind == "rough":
        vals = rest.split()
        if len(vals) not in (3, 4):
            raise ValueError("rough spec is 's p amplitude [seed]'")
        seed = int(vals[3]) if len(vals) == 4 else 0
        return ConductivitySpec("rough", s=float(vals[0]), p=float(vals[1]), amplitude=float(vals[2]), seed=seed)
    raise ValueError(f"unknown conductivity kind {kind!r}")


def _periodic_radius(grid, center):
    d = grid.x - np.asarray(center).reshape((-1,) + (1,) * grid.n)
    d = (d + grid.L / 2) % grid.L - grid.L / 2
    return np.sqrt(np.sum(d**2, axis=0))


def _finish(grid, gamma, R, center, info):
    lo, hi = float(gamma.min()), float(gamma.max())
    if lo <= MIN_GAMMA:
        raise EllipticityError(f"min gamma = {lo:.3f} <= {MIN_GAMMA}; reduce the amplitude")
    info = dict(info, gamma_min=lo, gamma_max=hi)
    return Conductivity(Field(grid, gamma), min(lo, 1 / hi), R, center, info=info)


def make_conductivity(spec, grid):
    R = grid.L / 4 if spec.support_radius is None else spec.support_radius
    center = grid.center()
    if spec.kind == "none":
        return _finish(grid, np.ones(grid.shape), R, center, {})
    if spec.kind == "bumps":
        gamma = np.ones(grid.shape)
        for b in spec.bumps:
            if abs(b.amplitude) > 0.3:
                raise ValueError(f"bump amplitude {b.amplitude} exceeds 0.3")
            r = _periodic_radius(grid, center + np.asarray(b.offset, dtype=float))
            gamma = gamma + b.amplitude * np.exp(-(r**2) / b.width**2)
        return _finish(grid, gamma, R, center, {"bumps": len(spec.bumps)})
    if spec.kind == "rough":
        rng = as_generator(spec.seed)
        series = rough_series(grid, spec.s, spec.p, spec.amplitude, rng)
        r = _periodic_radius(grid, center)
        window = smoothstep((R - r) / (0.4 * R))
        log_gamma = Field(grid, window * series.values.real)
        gamma = np.exp(log_gamma.values.real)
        info = {"besov": besov_sp_norm(log_gamma, spec.s, spec.p)}
        return _finish(grid, gamma, R, center, info)
    raise ValueError(f"unknown conductivity kind {spec.kind!r}")


def log_profile_slope(cond, p, lams):
    """Fitted exponent of ``||P_lam log gamma||_p`` against ``lam``."""
    lg = Field(cond.gamma.grid, np.log(cond.gamma.values.real))
    prof = besov_profile(lg, p, lams)
    return float(np.polyfit(np.log(lams), np.log([prof[lam] for lam in lams]), 1)[0])


# ---------------------------------------------------------------- zeta pairs


def rotation_to(a, b):
    """Minimal rotation taking the direction of ``a`` to that of ``b`` (Rodrigues)."""
    a = np.asarray(a, dtype=float) / np.linalg.norm(a)
    b = np.asarray(b, dtype=float) / np.linalg.norm(b)
    n = a.size
    c = float(a @ b)
    if c > 1 - 1e-15:
        return np.eye(n)
    if c < -1 + 1e-15:
        # half-turn about any axis orthogonal to a
        e = np.eye(n)[np.argmin(np.abs(a))]
        v = e - (e @ a) * a
        v /= np.linalg.norm(v)
        return 2 * np.outer(v, v) - np.eye(n)
    # rotation in the plane spanned by a, b
    u = a
    v = b - c * a
    v /= np.linalg.norm(v)
    s = np.sqrt(max(0.0, 1 - c * c))
    return (np.eye(n) + s * (np.outer(v, u) - np.outer(u, v))
            + (c - 1) * (np.outer(u, u) + np.outer(v, v)))


@dataclass(frozen=True, eq=False)
class ZetaPair:
    tau: float
    r: float
    U: OrthogonalSample
    k: np.ndarray
    zeta1: PhaseVector
    zeta2: PhaseVector
    zt1: np.ndarray
    zt2: np.ndarray
    snap_distance: float = 0.0

    @property
    def frame(self):
        return self.U.U[:, 0], self.U.U[:, 1], self.U.U[:, 2]

    @property
    def tilt(self):
        """``|zeta_i - zt_i|`` (the same for both members)."""
        return float(np.linalg.norm(self.zeta1.zeta - self.zt1))

    def tilted(self):
        return PhaseVector.from_complex(self.zt1), PhaseVector.from_complex(self.zt2)


def _as_sample(U):
    return U if isinstance(U, OrthogonalSample) else OrthogonalSample(np.asarray(U, dtype=float), 0)


def make_zeta_pair(tau, r, U, grid=None):
    """Tilted pair with ``zt1 + zt2 = i k``, ``k = 2 r U e3``.

    With a grid, ``k`` is rounded to the lattice and the frame is turned by the
    minimal rotation taking ``U e3`` onto the rounded direction (``r`` becomes
    ``|k|/2``; ``k = 0`` gives ``r = 0``).  ``zt1`` is rounded to a 2^-40 grid
    so that ``i k - zt1`` is exact and the sum identity holds bit for bit
    whenever ``k`` is representable on that grid (integer lattices, L = 2 pi).
    """
    U = _as_sample(U)
    if U.U.shape[0] < 3:
        raise ValueError("tilted pairs need n >= 3")
    if not (tau > r >= 0):
        raise ValueError(f"need tau > r >= 0, got tau={tau}, r={r}")
    Um = U.U
    k = 2 * r * Um[:, 2]
    snap = 0.0
    if grid is not None:
        kl = grid.d0 * np.rint(k / grid.d0)
        snap = float(np.max(np.abs(k - kl)) / grid.d0)
        grid.lattice_index(kl)
        if np.any(kl):
            Um = rotation_to(Um[:, 2], kl) @ Um
            r = float(np.linalg.norm(kl) / 2)
        else:
            r = 0.0
        k = kl
        U = OrthogonalSample(Um, U.det, U.provenance)
    e1, e2, e3 = Um[:, 0], Um[:, 1], Um[:, 2]
    s = np.sqrt(tau**2 - r**2)
    im1 = np.rint((r * e3 - s * e2) / SNAP) * SNAP
    zt1 = tau * e1 + 1j * im1
    zt2 = -tau * e1 + 1j * (k - im1)
    zeta1 = PhaseVector(tau, e1, e2)
    zeta2 = PhaseVector(tau, -e1, -e2)
    return ZetaPair(float(tau), float(r), U, np.asarray(k, dtype=float), zeta1, zeta2, zt1, zt2, snap)


# ---------------------------------------------------------------- recovery


@dataclass(eq=False)
class RecoveryResult:
    k: np.ndarray
    tau: float
    U: OrthogonalSample
    qhat_est: complex
    qhat_true: complex
    linear: complex
    bilinear: complex
    delta: float = None
    pair: ZetaPair = None
    solutions: tuple = ()
    extra: dict = field(default_factory=dict)

    @property
    def error(self):
        return self.qhat_est - self.qhat_true

    @property
    def bookkeeping_defect(self):
        return abs(self.error - (self.linear + self.bilinear))


def _potential(gamma_or_q):
    if isinstance(gamma_or_q, Conductivity):
        return schrodinger_potential(gamma_or_q).q
    return gamma_or_q


def recover_fourier(gamma_or_q, k, tau, U, r=None, tol=1e-10, delta=None):
    """Estimate ``qhat(k)`` from the CGO pair aligned with ``k``."""
    q = _potential(gamma_or_q)
    grid = q.grid
    k = np.asarray(k, dtype=float)
    grid.lattice_index(k)
    half = float(np.linalg.norm(k) / 2)
    if r is not None and abs(r - half) > 1e-12 * max(1.0, half):
        raise ValueError(f"r = {r} does not match |k|/2 = {half}")
    U = _as_sample(U)
    Um = U.U
    if np.any(k):
        Um = rotation_to(Um[:, 2], k) @ Um
    pair = make_zeta_pair(tau, half, OrthogonalSample(Um, U.det, U.provenance), grid)
    z1, z2 = pair.tilted()
    s1 = solve_cgo(q, z1, tol=tol)
    s2 = solve_cgo(q, z2, tol=tol)
    V = grid.volume
    est = pairing(q, pair.k, s1.psi, s2.psi) / V
    lead, lin, bil = pairing_terms(q, pair.k, s1.psi, s2.psi)
    return RecoveryResult(
        k=pair.k, tau=tau, U=pair.U,
        qhat_est=complex(est), qhat_true=complex(lead / V),
        linear=complex(lin / V), bilinear=complex(bil / V),
        delta=delta, pair=pair, solutions=(s1, s2),
        extra={"residual": max(s1.residual, s2.residual)},
    )


def alessandrini_gap(q1, q2, k, pair, psi1, psi2):
    """``<q1 - q2, exp(i k.x)(1 + psi1)(1 + psi2)>``."""
    if pair is not None and not np.array_equal(np.asarray(k, dtype=float), pair.k):
        raise ValueError("k does not match the pair")
    diff = Field(q1.grid, q1.values - q2.values)
    return pairing(diff, k, psi1, psi2)


# ---------------------------------------------------------------- parameter selection


@dataclass(eq=False)
class Selection:
    tau: float
    U: OrthogonalSample
    delta: float
    values: list
    draws: int

    def __iter__(self):
        return iter((self.tau, self.U, self.delta))


def selection_functional(q1, q2, tau, U, p=None, rng=None):
    """``sum_i ||m_{q_i}||^p + sum_{i,j} ||q_i||^2_{X^{-1/2}_{zeta_j}}`` with ``zeta_2 = -zeta_1``."""
    grid = q1.grid
    p = grid.n if p is None else p
    Um = _as_sample(U).U
    zs = (PhaseVector(tau, Um[:, 0], Um[:, 1]), PhaseVector(tau, -Um[:, 0], -Um[:, 1]))
    rng = as_generator(rng)
    total = 0.0
    for q, z in zip((q1, q2), zs):
        if np.any(q.values):
            total += bilinear_norm(q, z, "mf", 1, rng).value ** p
    for q in (q1, q2):
        if not np.any(q.values):
            continue
        g = forward_transform(q)
        for z in zs:
            total += x_norm(g, z, -0.5) ** 2
    return float(total)


def select_parameters(q1, q2, M, eps_ball, samples, rng=None, p=None, candidates=None, max_draws=2_000_000):
    """Minimise the selection functional over ``tau ~ U[M, 2M]``, Haar ``U`` with ``||U - I|| < eps``.

    ``candidates`` (a list of ``(tau, U)``) replaces the random draws; those
    outside the ball are dropped, so a smaller ball is an infimum over a subset.
    """
    grid = q1.grid
    if samples < 8:
        raise ValueError("select_parameters needs samples >= 8")
    if 2 * M > grid.xi_max:
        raise NyquistError(f"2M = {2 * M} exceeds the Nyquist bound {grid.xi_max}")
    rng = as_generator(rng)
    n = grid.n
    eye = np.eye(n)
    pool = []
    draws = 0
    if candidates is not None:
        for tau, U in candidates:
            U = _as_sample(U)
            draws += 1
            if np.linalg.norm(U.U - eye, 2) < eps_ball:
                pool.append((float(tau), U))
    else:
        while len(pool) < samples and draws < max_draws:
            tau = rng.uniform(M, 2 * M)
            U = sample_haar(n, rng)
            draws += 1
            if np.linalg.norm(U.U - eye, 2) < eps_ball:
                pool.append((tau, U))
    if not pool:
        raise RejectionError(f"no draw landed in the ball of radius {eps_ball}; increase eps_ball")
    values = [selection_functional(q1, q2, tau, U, p, rng) for tau, U in pool]
    i = int(np.argmin(values))
    return Selection(pool[i][0], pool[i][1], values[i], values, draws)


# ---------------------------------------------------------------- integral identity


def gradient_identity_check(gamma1, gamma2, refine=2):
    """Relative gap between ``int (g2 grad g1 - g1 grad g2).grad w`` and ``int g1 g2 |grad w|^2``.

    ``g_i = sqrt(gamma_i)``, ``w = log g1 - log g2``; both sides are evaluated on
    a grid refined by ``refine`` from band-limited interpolants of ``gamma_i``.
    """
    c1 = gamma1.gamma if isinstance(gamma1, Conductivity) else gamma1
    c2 = gamma2.gamma if isinstance(gamma2, Conductivity) else gamma2
    fine = c1.grid.refine(refine)
    a = resample(c1, fine).values.real
    b = resample(c2, fine).values.real
    g1 = Field(fine, np.sqrt(a))
    g2 = Field(fine, np.sqrt(b))
    w = Field(fine, 0.5 * (np.log(a) - np.log(b)))
    d1 = spectral_gradient(g1)
    d2 = spectral_gradient(g2)
    dw = spectral_gradient(w)
    lhs = sum(
        integrate(Field(fine, (g2.values * d1[j].values - g1.values * d2[j].values) * dw[j].values))
        for j in range(fine.n)
    )
    rhs = integrate(Field(fine, g1.values * g2.values * sum(np.abs(d.values) ** 2 for d in dw)))
    lhs, rhs = lhs.real, rhs.real
    if rhs == 0 and lhs == 0:
        return 0.0
    return float(abs(lhs - rhs) / max(abs(rhs), abs(lhs)))

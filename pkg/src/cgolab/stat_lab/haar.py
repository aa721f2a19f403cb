"""Haar-distributed orthogonal matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import beta as beta_fn

from ..rng import as_generator


@dataclass(frozen=True, eq=False)
class OrthogonalSample:
    U: np.ndarray
    det: int
    provenance: tuple = ()

    def __post_init__(self):
        U = np.array(self.U, dtype=float)
        U.flags.writeable = False
        object.__setattr__(self, "U", U)
        err = np.max(np.abs(U.T @ U - np.eye(U.shape[0])))
        if err > 1e-12:
            raise ValueError(f"matrix is not orthogonal to 1e-12 (max defect {err:.2e})")


def sample_haar(n, rng=None, provenance=()):
    """Gaussian matrix -> QR with ``diag(R) > 0``, then a fair coin flips the last column."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = as_generator(rng)
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    Q = Q * np.sign(np.diag(R))
    if rng.integers(2):
        Q[:, -1] = -Q[:, -1]
    det = int(round(np.linalg.det(Q)))
    return OrthogonalSample(Q, det, tuple(provenance))


class RejectionError(RuntimeError):
    pass


def sample_haar_ball(n, eps, rng=None, max_tries=2_000_000):
    """Haar sample conditioned on ``||U - I||_2 < eps`` by rejection."""
    rng = as_generator(rng)
    for t in range(max_tries):
        s = sample_haar(n, rng)
        if np.linalg.norm(s.U - np.eye(n), 2) < eps:
            return s, t + 1
    raise RejectionError(
        f"no Haar sample within {eps} of the identity after {max_tries} draws; increase eps"
    )


def sphere_marginal_pdf(t, n):
    """Density of ``omega . v`` for ``omega`` uniform on ``S^{n-1}``: ``c (1-t^2)^{(n-3)/2}``."""
    t = np.asarray(t, dtype=float)
    c = 1.0 / beta_fn(0.5, (n - 1) / 2)
    return np.where(np.abs(t) < 1, c * np.clip(1 - t**2, 0, None) ** ((n - 3) / 2), 0.0)


def sphere_marginal_cdf(t, n):
    """CDF of the same marginal via the regularised incomplete beta function."""
    from scipy.special import betainc

    t = np.clip(np.asarray(t, dtype=float), -1, 1)
    a = (n - 1) / 2
    # (1+t)/2 ~ Beta(a, a)
    return betainc(a, a, (1 + t) / 2)

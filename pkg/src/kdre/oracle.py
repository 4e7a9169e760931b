"""Closed-form ground truth for Gaussian F and G.

Provides the densities, the true ratio ``f/g``, the analytic conditional CDFs
``H_l`` of G, and a Monte-Carlo evaluation of the population version of the
direct estimator,

    (1/h^d) * E_F[ K((H(z) - H(X)) / h) ],

which tends to ``f(z)/g(z)`` as ``h -> 0`` because the density of ``H(X)`` at
``H(z)`` is the ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import solve_triangular
from scipy.special import ndtr

from kdre.core import GaussianSpec, InvalidSpecError
from kdre.kernels import KernelSpec
from kdre.synth import MC_STREAM, SeededStream, sample_mvn


@dataclass(frozen=True)
class GaussianPair:
    F: GaussianSpec
    G: GaussianSpec

    def __post_init__(self) -> None:
        if self.F.dim != self.G.dim:
            raise InvalidSpecError(f"F and G dimensions differ: {self.F.dim} vs {self.G.dim}")

    @property
    def dim(self) -> int:
        return self.F.dim


def _batch(z: ArrayLike, d: int) -> tuple[NDArray, bool]:
    z = np.asarray(z, dtype=float)
    single = z.ndim <= 1
    z = z.reshape(-1, d)
    return z, single


def mvn_pdf(spec: GaussianSpec, z: ArrayLike):
    """Multivariate normal density via a triangular solve with the Cholesky factor."""
    pts, single = _batch(z, spec.dim)
    L = spec.chol
    sol = solve_triangular(L, (pts - spec.mean).T, lower=True)
    maha = np.sum(sol * sol, axis=0)
    log_norm = -0.5 * spec.dim * math.log(2 * math.pi) - np.sum(np.log(np.diag(L)))
    out = np.exp(log_norm - 0.5 * maha)
    return float(out[0]) if single else out


def true_ratio(pair: GaussianPair, z: ArrayLike):
    return mvn_pdf(pair.F, z) / mvn_pdf(pair.G, z)


def conditional_moments(spec: GaussianSpec, level: int, cond: ArrayLike):
    """Mean and variance of coordinate ``level`` given the first ``level - 1``.

    ``cond`` holds the conditioning values, shape ``(N, level - 1)``.
    """
    k = level - 1
    mu, cov = spec.mean, spec.cov
    if k == 0:
        return np.full(np.shape(cond)[0], mu[0]), cov[0, 0]
    a = np.linalg.solve(cov[:k, :k], cov[:k, k])
    mean = mu[k] + (np.asarray(cond) - mu[:k]) @ a
    var = cov[k, k] - cov[k, :k] @ a
    return mean, var


def gaussian_conditional_cdf(spec: GaussianSpec, z: ArrayLike, level: int):
    """Analytic ``P(Y_l <= z_l | Y_1 = z_1, ..., Y_{l-1} = z_{l-1})`` for ``Y ~ spec``."""
    if not 1 <= level <= spec.dim:
        raise ValueError(f"level must lie in [1, {spec.dim}], got {level}")
    pts, single = _batch(z, spec.dim)
    mean, var = conditional_moments(spec, level, pts[:, : level - 1])
    out = ndtr((pts[:, level - 1] - mean) / math.sqrt(var))
    return float(out[0]) if single else out


def gaussian_cdf_vector(spec: GaussianSpec, z: ArrayLike) -> NDArray[np.float64]:
    """Stack of the analytic conditional CDFs; shape ``(d,)`` or ``(N, d)``."""
    pts, single = _batch(z, spec.dim)
    out = np.stack(
        [gaussian_conditional_cdf(spec, pts, level) for level in range(1, spec.dim + 1)],
        axis=-1,
    )
    return out[0] if single else out


def mc_limit_integral(
    pair: GaussianPair,
    z: ArrayLike,
    kernel: KernelSpec,
    h: float,
    N: int = 1_000_000,
    seed: int = 0,
):
    """Monte-Carlo value of ``(1/h^d) E_F[K((H(z) - H(X))/h)]`` with the analytic H of G.

    ``z`` may be a single point or a batch; a batch reuses the same draw of
    ``N`` points from F for every evaluation point.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    d = pair.dim
    x = sample_mvn(pair.F, N, SeededStream(seed, MC_STREAM)).points
    hx = gaussian_cdf_vector(pair.G, x)
    pts, single = _batch(z, d)
    hz = gaussian_cdf_vector(pair.G, pts)
    scale = h**d
    out = np.array([math.fsum(kernel((row - hx) / h)) / N / scale for row in hz])
    return float(out[0]) if single else out

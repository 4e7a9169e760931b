"""Density-ratio estimators.

``DirectKdre`` smooths in the unit cube: the X points and the query point are
pushed through the fitted conditional-CDF map of the Y sample, and a kernel
density estimate of the transformed X sample is read off at the transformed
query point,

    r_hat(z) = 1/(n h^d) * sum_i K((H_hat(z) - H_hat(X_i)) / h).

``IndirectKdre`` is the plain baseline ``f_hat(z) / g_hat(z)`` of two kernel
density estimates.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from kdre.cdf import ConditionalCdfModel
from kdre.core import (
    CHANNELS,
    FLAG_DIVIDE_BY_ZERO,
    FLAG_TOKENS,
    FLAG_WEIGHT_FALLBACK,
    BandwidthSpec,
    GridSpec,
    InvalidSpecError,
    RatioField,
    SampleSet,
    as_point,
    lattice_points,
)
from kdre.kernels import BOXCAR, GAUSSIAN_PRODUCT, GAUSSIAN_RADIAL, KernelSpec
from kdre.oracle import GaussianPair, true_ratio

_KDE_CHUNK = 4096


def kde(sample: SampleSet, kernel: KernelSpec, h: float, z: ArrayLike):
    """Kernel density estimate ``1/(N h^d) sum_i K((z - Z_i)/h)``.

    ``z`` may be one point or an ``(M, d)`` batch.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    pts = np.asarray(z, dtype=float)
    single = pts.ndim <= 1
    pts = pts.reshape(-1, sample.dim)
    data = sample.points
    scale = h**sample.dim
    out = np.empty(pts.shape[0])
    step = max(1, _KDE_CHUNK * 64 // max(1, sample.size))
    for start in range(0, pts.shape[0], step):
        block = pts[start : start + step]
        u = (block[:, None, :] - data[None, :, :]) / h
        out[start : start + step] = kernel(u).sum(axis=1) / sample.size / scale
    return float(out[0]) if single else out


class IndirectKdre:
    """Ratio of two kernel density estimates.

    Both densities use the standard-normal product kernel by default;
    ``hX`` and ``hY`` are the per-sample bandwidths.
    """

    def __init__(
        self,
        x_sample: SampleSet,
        y_sample: SampleSet,
        hX: float,
        hY: float | None = None,
        kernel_family: str = GAUSSIAN_PRODUCT,
    ):
        if x_sample.dim != y_sample.dim:
            raise InvalidSpecError("X and Y samples differ in dimension")
        self.x_sample = x_sample
        self.y_sample = y_sample
        self.hX = float(hX)
        self.hY = float(hX if hY is None else hY)
        if self.hX <= 0 or self.hY <= 0:
            raise InvalidSpecError("KDE bandwidths must be positive")
        self.kernel = KernelSpec(kernel_family, x_sample.dim)

    @property
    def dim(self) -> int:
        return self.x_sample.dim

    def estimate(self, z: ArrayLike) -> tuple[float, bool]:
        """Return ``(ratio, divide_by_zero)``; the ratio is 0 when ``g_hat(z) == 0``."""
        z = as_point(z, self.dim)
        g = kde(self.y_sample, self.kernel, self.hY, z)
        if g == 0.0:
            return 0.0, True
        return kde(self.x_sample, self.kernel, self.hX, z) / g, False


def estimate_indirect(model: IndirectKdre, z: ArrayLike) -> tuple[float, bool]:
    return model.estimate(z)


class DirectKdre:
    """Direct kernel density-ratio estimator in ``d`` dimensions.

    Construct through :func:`fit_direct`.  The transformed X sample
    ``H_hat(X_i)`` does not depend on the query point, so it is computed once
    at fit time and kept in ``hx_cache``.
    """

    def __init__(
        self,
        x_sample: SampleSet,
        cdf_model: ConditionalCdfModel,
        main_kernel: KernelSpec,
        h: float,
    ):
        if x_sample.dim != cdf_model.dim or main_kernel.dim != cdf_model.dim:
            raise InvalidSpecError("X sample, Y sample and main kernel must share one dimension")
        if h <= 0:
            raise InvalidSpecError("h must be positive")
        self.x_sample = x_sample
        self.cdf_model = cdf_model
        self.main_kernel = main_kernel
        self.h = float(h)
        cache, fallback = cdf_model.evaluate_many(x_sample.points)
        cache.setflags(write=False)
        self.hx_cache = cache
        self.cache_fallbacks = int(np.count_nonzero(fallback))
        self._sup = main_kernel.sup

    @property
    def dim(self) -> int:
        return self.x_sample.dim

    @property
    def n(self) -> int:
        return self.x_sample.size

    @property
    def upper_bound(self) -> float:
        """``sup K / h^d``, the largest value the estimator can return."""
        return self._sup / self.h**self.dim

    def kernel_arguments(self, z: ArrayLike) -> NDArray[np.float64]:
        """The ``(n, d)`` array ``(H_hat(z) - H_hat(X_i)) / h`` fed to the kernel."""
        hz, _ = self.cdf_model.evaluate(z)
        return (hz - self.hx_cache) / self.h

    def estimate(self, z: ArrayLike) -> tuple[float, bool]:
        """Return ``(ratio, weight_fallback)`` at ``z``."""
        hz, fallback = self.cdf_model.evaluate(z)
        k = self.main_kernel((hz - self.hx_cache) / self.h)
        mean = math.fsum(k) / self.n
        # rounding guard: an average of values <= sup cannot exceed sup
        mean = min(mean, self._sup)
        return mean / self.h**self.dim, fallback


def fit_direct(
    x_sample: SampleSet,
    y_sample: SampleSet,
    bandwidths: BandwidthSpec,
    main_family: str = BOXCAR,
    weight_family: str = GAUSSIAN_RADIAL,
) -> DirectKdre:
    if x_sample.dim != y_sample.dim:
        raise InvalidSpecError("X and Y samples differ in dimension")
    cdf_model = ConditionalCdfModel(y_sample, bandwidths, weight_family)
    return DirectKdre(x_sample, cdf_model, KernelSpec(main_family, x_sample.dim), bandwidths.h)


def estimate_direct(model: DirectKdre, z: ArrayLike) -> float:
    return model.estimate(z)[0]


def evaluate_field(
    grid: GridSpec,
    channels: Iterable[str],
    *,
    direct: DirectKdre | None = None,
    indirect: IndirectKdre | None = None,
    pair: GaussianPair | None = None,
    workers: int = 1,
) -> RatioField:
    """Evaluate the requested channels at every lattice point of ``grid``.

    Each point is computed independently, so ``workers > 1`` only changes
    wall time, never the output.
    """
    channels = list(dict.fromkeys(channels))
    for c in channels:
        if c not in CHANNELS:
            raise ValueError(f"unknown channel {c!r}")
    sources = {"true": pair, "direct": direct, "indirect": indirect}
    for c in channels:
        if sources[c] is None:
            raise ValueError(f"channel {c!r} requested without a model")
        if sources[c].dim != grid.dim:
            raise InvalidSpecError(f"channel {c!r} model has dimension {sources[c].dim}, grid has {grid.dim}")

    pts = lattice_points(grid)

    def cell(z):
        vals, toks = {}, []
        if "true" in channels:
            vals["true"] = float(true_ratio(pair, z))
        if "direct" in channels:
            vals["direct"], fb = direct.estimate(z)
            if fb:
                toks.append(FLAG_WEIGHT_FALLBACK)
        if "indirect" in channels:
            vals["indirect"], dz = indirect.estimate(z)
            if dz:
                toks.append(FLAG_DIVIDE_BY_ZERO)
        return vals, tuple(t for t in FLAG_TOKENS if t in toks)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(cell, pts))
    else:
        cells = [cell(z) for z in pts]

    values = {c: np.array([v[c] for v, _ in cells]) for c in channels}
    return RatioField(grid, values, tuple(t for _, t in cells))

"""Empirical and conditional CDF estimators fitted on the Y sample.

The conditional CDF of coordinate ``l`` given the first ``l - 1`` coordinates
is estimated with Nadaraya-Watson weights over the Y points and a hard
indicator on coordinate ``l``.  Stacking the ``d`` conditional CDFs gives the
map ``z -> H(z)`` into the unit cube used by the direct ratio estimator.

Levels are numbered from 1 as in the usual notation: level 1 is the marginal
CDF of the first coordinate and carries uniform weights ``1/m``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from kdre.core import BandwidthSpec, SampleSet, as_point
from kdre.kernels import GAUSSIAN_RADIAL, KernelSpec

#: Kernel values below this are zeroed before normalization.
UNDERFLOW = 1e-300


def ecdf(y: ArrayLike, z: float) -> float:
    """Right-continuous empirical CDF ``#{j : y_j <= z} / m``."""
    y = np.asarray(y, dtype=float).ravel()
    if y.size == 0:
        raise ValueError("empty sample")
    return np.count_nonzero(y <= z) / y.size


def delta_projection(yj: ArrayLike, z: ArrayLike, level: int) -> NDArray[np.float64]:
    """First ``level - 1`` coordinates of ``yj - z``.

    Also accepts a ``(m, d)`` batch for ``yj``, projecting each row.
    """
    yj = np.asarray(yj, dtype=float)
    z = np.asarray(z, dtype=float)
    d = z.shape[-1]
    if yj.shape[-1] != d:
        raise ValueError(f"dimension mismatch: {yj.shape[-1]} vs {d}")
    if not 2 <= level <= d:
        raise ValueError(f"level must lie in [2, {d}], got {level}")
    return yj[..., : level - 1] - z[: level - 1]


@dataclass(frozen=True)
class WeightVector:
    weights: NDArray[np.float64]
    fallback: bool = False


class ConditionalCdfModel:
    """The fitted conditional-CDF map ``H_hat`` for one Y sample.

    Parameters
    ----------
    y_sample : SampleSet
        The sample from G, of size m and dimension d.
    bandwidths : BandwidthSpec
        Only ``epsilons`` is used; ``epsilons[l - 2]`` scales the weights at
        level ``l``.
    weight_family : str
        Kernel family for the Nadaraya-Watson weights. Defaults to the
        radial Gaussian ``pi^(-k/2) exp(-||u||^2)``.
    """

    def __init__(
        self,
        y_sample: SampleSet,
        bandwidths: BandwidthSpec,
        weight_family: str = GAUSSIAN_RADIAL,
    ):
        bandwidths.check_dim(y_sample.dim)
        self.y_sample = y_sample
        self.bandwidths = bandwidths
        self.weight_family = weight_family
        self._y = y_sample.points
        self._kernels = [KernelSpec(weight_family, k) for k in range(1, y_sample.dim)]

    @property
    def dim(self) -> int:
        return self.y_sample.dim

    @property
    def m(self) -> int:
        return self.y_sample.size

    def _check_level(self, level: int) -> None:
        if not 1 <= level <= self.dim:
            raise ValueError(f"level must lie in [1, {self.dim}], got {level}")

    def _raw_weights(self, z: NDArray, level: int) -> tuple[NDArray, bool]:
        if level == 1:
            return np.full(self.m, 1.0 / self.m), False
        eps = self.bandwidths.epsilons[level - 2]
        u = (self._y[:, : level - 1] - z[: level - 1]) / eps
        k = self._kernels[level - 2](u)
        k = np.where(k < UNDERFLOW, 0.0, k)
        total = k.sum()
        if total == 0.0:
            return np.full(self.m, 1.0 / self.m), True
        return k / total, False

    def nw_weights(self, z: ArrayLike, level: int) -> WeightVector:
        z = as_point(z, self.dim)
        self._check_level(level)
        w, fallback = self._raw_weights(z, level)
        return WeightVector(w, fallback)

    def _level_value(self, z: NDArray, level: int) -> tuple[float, bool]:
        below = self._y[:, level - 1] <= z[level - 1]
        if level == 1:
            return np.count_nonzero(below) / self.m, False
        w, fallback = self._raw_weights(z, level)
        if fallback:
            return np.count_nonzero(below) / self.m, True
        # masked sum never exceeds the full sum, up to the final rounding of 1
        return min(float(np.where(below, w, 0.0).sum()), 1.0), False

    def conditional_cdf(self, z: ArrayLike, level: int) -> float:
        """Estimated ``P(Y_l <= z_l | Y_1 = z_1, ..., Y_{l-1} = z_{l-1})``."""
        z = as_point(z, self.dim)
        self._check_level(level)
        return self._level_value(z, level)[0]

    def evaluate(self, z: ArrayLike) -> tuple[NDArray[np.float64], bool]:
        """``H_hat(z)`` together with whether any level fell back to uniform weights."""
        z = as_point(z, self.dim)
        out = np.empty(self.dim)
        any_fallback = False
        for level in range(1, self.dim + 1):
            out[level - 1], fb = self._level_value(z, level)
            any_fallback |= fb
        return out, any_fallback

    def cdf_vector(self, z: ArrayLike) -> NDArray[np.float64]:
        return self.evaluate(z)[0]

    def evaluate_many(self, points: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
        """Row-by-row :meth:`evaluate`; each row is computed independently."""
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        out = np.empty_like(points)
        flags = np.zeros(points.shape[0], dtype=bool)
        for i, p in enumerate(points):
            out[i], flags[i] = self.evaluate(p)
        return out, flags

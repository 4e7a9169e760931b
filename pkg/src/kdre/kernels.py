"""Kernel functions.

All kernels take arrays whose last axis holds the coordinates and return one
value per leading index, so a single point ``(d,)`` gives a scalar and a batch
``(N, d)`` gives ``(N,)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

BOXCAR = "boxcar"
GAUSSIAN_RADIAL = "gaussian-radial"
GAUSSIAN_PRODUCT = "gaussian-product"
FAMILIES = (BOXCAR, GAUSSIAN_RADIAL, GAUSSIAN_PRODUCT)


def _coords(z: ArrayLike, dim: int | None) -> NDArray[np.float64]:
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        z = z.reshape(1)
    if dim is not None and z.shape[-1] != dim:
        raise ValueError(f"kernel of dimension {dim} got input with last axis {z.shape[-1]}")
    return z


def boxcar(z: ArrayLike, dim: int | None = None):
    """Indicator of the closed box ``[-1/2, 1/2]^d``."""
    z = _coords(z, dim)
    return np.all(np.abs(z) <= 0.5, axis=-1).astype(float)


def gaussian_radial(delta: ArrayLike, dim: int | None = None):
    """``pi^(-d/2) * exp(-||delta||^2)``.

    Note the exponent has no 1/2 factor; the constant still normalizes the
    kernel to unit mass.
    """
    delta = _coords(delta, dim)
    d = delta.shape[-1]
    sq = np.sum(delta * delta, axis=-1)
    return math.pi ** (-d / 2) * np.exp(-sq)


def gaussian_product(z: ArrayLike, dim: int | None = None):
    """Product of standard normal densities, ``prod_k phi(z_k)``."""
    z = _coords(z, dim)
    d = z.shape[-1]
    sq = np.sum(z * z, axis=-1)
    return (2.0 * math.pi) ** (-d / 2) * np.exp(-0.5 * sq)


_EVALUATORS: dict[str, Callable] = {
    BOXCAR: boxcar,
    GAUSSIAN_RADIAL: gaussian_radial,
    GAUSSIAN_PRODUCT: gaussian_product,
}


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family fixed to a dimension."""

    family: str
    dim: int

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; expected one of {FAMILIES}")
        if int(self.dim) < 1:
            raise ValueError("kernel dimension must be positive")
        object.__setattr__(self, "dim", int(self.dim))

    def __call__(self, z: ArrayLike):
        return _EVALUATORS[self.family](z, self.dim)

    @property
    def sup(self) -> float:
        """Maximum value of the kernel, attained at the origin."""
        return float(self(np.zeros(self.dim)))

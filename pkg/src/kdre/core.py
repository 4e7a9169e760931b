"""Domain types shared across the package.

Points are represented as 1-D float arrays and sample sets as ``(size, d)``
arrays. Every container here is immutable after construction: the backing
arrays are copied and flagged read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

#: Per-cell status tokens carried by :class:`RatioField`.
FLAG_OK = "ok"
FLAG_DIVIDE_BY_ZERO = "divide-by-zero"
FLAG_WEIGHT_FALLBACK = "weight-fallback"
FLAG_TOKENS = (FLAG_DIVIDE_BY_ZERO, FLAG_WEIGHT_FALLBACK)

CHANNELS = ("true", "direct", "indirect")


class InvalidSpecError(ValueError):
    """Raised when a domain object violates its invariants."""


def _frozen(a: NDArray) -> NDArray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def as_point(coords: ArrayLike, dim: int | None = None) -> NDArray[np.float64]:
    """Validate ``coords`` as a finite point, optionally of dimension ``dim``."""
    p = np.asarray(coords, dtype=float)
    if p.ndim == 0:
        p = p.reshape(1)
    if p.ndim != 1 or p.size == 0:
        raise InvalidSpecError(f"a point must be a nonempty 1-D vector, got shape {p.shape}")
    if dim is not None and p.size != dim:
        raise InvalidSpecError(f"expected a point of dimension {dim}, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise InvalidSpecError("point coordinates must be finite")
    return p


@dataclass(frozen=True)
class SampleSet:
    """An ordered, homogeneous collection of d-dimensional points."""

    points: NDArray[np.float64]

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise InvalidSpecError(f"sample must be a nonempty (size, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidSpecError("sample coordinates must be finite")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SampleSet):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(np.array_equal(self.points, other.points))

    __hash__ = None  # type: ignore[assignment]

    def permuted(self, order: Sequence[int]) -> "SampleSet":
        """Return a copy with the coordinate axes reordered by ``order`` (0-based)."""
        return SampleSet(self.points[:, list(order)])


@dataclass(frozen=True)
class GaussianSpec:
    """Mean vector and SPD covariance of a multivariate normal."""

    mean: NDArray[np.float64]
    cov: NDArray[np.float64]
    chol: NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        mean = as_point(self.mean)
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        d = mean.size
        if cov.shape != (d, d):
            raise InvalidSpecError(f"covariance must be {d}x{d}, got {cov.shape}")
        if not np.all(np.isfinite(cov)):
            raise InvalidSpecError("covariance entries must be finite")
        if np.max(np.abs(cov - cov.T)) > 1e-12:
            raise InvalidSpecError("covariance must be symmetric (tolerance 1e-12)")
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise InvalidSpecError("covariance is not positive definite") from exc
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen(cov))
        object.__setattr__(self, "chol", _frozen(chol))

    @property
    def dim(self) -> int:
        return self.mean.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GaussianSpec):
            return NotImplemented
        return bool(np.array_equal(self.mean, other.mean) and np.array_equal(self.cov, other.cov))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class BandwidthSpec:
    """Main bandwidth ``h`` and the per-level weight bandwidths ``epsilons``.

    ``epsilons[k]`` smooths the conditioning on the first ``k + 1``
    coordinates, so a d-dimensional problem needs exactly ``d - 1`` of them.
    """

    h: float
    epsilons: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        eps = tuple(float(e) for e in self.epsilons)
        h = float(self.h)
        if not (np.isfinite(h) and h > 0):
            raise InvalidSpecError(f"bandwidth h must be positive, got {self.h!r}")
        for e in eps:
            if not (np.isfinite(e) and e > 0):
                raise InvalidSpecError(f"every epsilon must be positive, got {e!r}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "epsilons", eps)

    @property
    def dim(self) -> int:
        return len(self.epsilons) + 1

    def check_dim(self, d: int) -> None:
        if len(self.epsilons) != d - 1:
            raise InvalidSpecError(f"expected {d - 1} epsilons for d={d}, got {len(self.epsilons)}")


@dataclass(frozen=True)
class GridSpec:
    """Rectangular lattice with inclusive endpoints on every axis."""

    lower: NDArray[np.float64]
    upper: NDArray[np.float64]
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        lower = as_point(self.lower)
        upper = as_point(self.upper, lower.size)
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != lower.size:
            raise InvalidSpecError(f"counts must have {lower.size} entries, got {len(counts)}")
        if any(c < 1 for c in counts):
            raise InvalidSpecError("grid counts must be positive")
        if np.any(lower >= upper):
            raise InvalidSpecError("grid requires lower < upper on every axis")
        object.__setattr__(self, "lower", _frozen(lower))
        object.__setattr__(self, "upper", _frozen(upper))
        object.__setattr__(self, "counts", counts)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def axes(self) -> list[NDArray[np.float64]]:
        out = []
        for lo, hi, c in zip(self.lower, self.upper, self.counts):
            # a single node sits at the lower bound
            out.append(np.array([lo]) if c == 1 else np.linspace(lo, hi, c))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridSpec):
            return NotImplemented
        return (
            self.counts == other.counts
            and bool(np.array_equal(self.lower, other.lower))
            and bool(np.array_equal(self.upper, other.upper))
        )

    __hash__ = None  # type: ignore[assignment]


def lattice_points(grid: GridSpec) -> NDArray[np.float64]:
    """All lattice nodes of ``grid`` as a ``(size, d)`` array.

    Row-major order with the last axis varying fastest: counts ``(3, 2)`` on
    the unit square give ``(0, 0), (0, 1), (0.5, 0), (0.5, 1), (1, 0), (1, 1)``.
    """
    mesh = np.meshgrid(*grid.axes(), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


@dataclass(frozen=True)
class RatioField:
    """Named estimate channels on a grid, plus per-cell status flags.

    ``values`` maps channel name to a flat array in lattice order.
    ``flags`` holds one tuple of tokens per cell; an empty tuple means ok.
    """

    grid: GridSpec
    values: Mapping[str, NDArray[np.float64]]
    flags: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        size = self.grid.size
        vals = {}
        for name, v in self.values.items():
            arr = np.asarray(v, dtype=float)
            if arr.shape != (size,):
                raise InvalidSpecError(f"channel {name!r} has shape {arr.shape}, expected ({size},)")
            vals[name] = _frozen(arr)
        flags = tuple(tuple(f) for f in self.flags)
        if len(flags) != size:
            raise InvalidSpecError(f"expected {size} flag entries, got {len(flags)}")
        for cell in flags:
            for tok in cell:
                if tok not in FLAG_TOKENS:
                    raise InvalidSpecError(f"unknown flag token {tok!r}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "flags", flags)

    @property
    def channels(self) -> list[str]:
        return list(self.values)

    def ok_mask(self) -> NDArray[np.bool_]:
        return np.array([not f for f in self.flags], dtype=bool)

    def flag_strings(self) -> list[str]:
        return [";".join(f) if f else FLAG_OK for f in self.flags]


def merge_flags(*per_cell: Iterable[Iterable[str]]) -> tuple[tuple[str, ...], ...]:
    """Union several per-cell flag lists, keeping the canonical token order."""
    merged: list[set[str]] = []
    for source in per_cell:
        source = list(source)
        if not merged:
            merged = [set() for _ in source]
        if len(source) != len(merged):
            raise ValueError("flag lists differ in length")
        for acc, toks in zip(merged, source):
            acc.update(toks)
    return tuple(tuple(t for t in FLAG_TOKENS if t in acc) for acc in merged)

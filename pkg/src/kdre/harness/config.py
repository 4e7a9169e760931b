"""Experiment configuration: YAML files with a fixed set of keys.

Example (the favorable scenario at n = m = 10000)::

    d: 2
    n: 10000
    m: 10000
    bandwidths: {h: 0.1, epsilons: [0.1]}
    mainKernel: boxcar
    grid: {lower: [-1.5, -1.5], upper: [1.5, 1.5], counts: [15, 15]}
    F: {mean: [0.0, -0.5], cov: [[0.3, 0.1], [0.1, 0.3]]}
    G: {mean: [0.0, 0.0], cov: [[0.5, 0.1], [0.1, 0.5]]}
    seed: 1
    channels: ["true", "direct", "indirect"]
    coordinatePermutation: null      # or a permutation of 1..d
    indirect: {hX: 0.1, hY: 0.1}     # optional, defaults to h

Quote ``"true"`` in channel lists: bare ``true`` is a YAML boolean (it is
accepted anyway).
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import yaml

from kdre.core import CHANNELS, BandwidthSpec, GaussianSpec, GridSpec, InvalidSpecError
from kdre.kernels import FAMILIES

CANONICAL = (
    "favorable_n100",
    "favorable_n1000",
    "favorable_n10000",
    "imbalanced_n100_m10000",
    "imbalanced_n10000_m100",
    "larger_ratio",
)

_KEYS = {
    "d", "n", "m", "bandwidths", "mainKernel", "grid", "F", "G", "seed",
    "channels", "coordinatePermutation", "indirect",
}


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    n: int
    m: int
    bandwidths: BandwidthSpec
    mainKernel: str
    grid: GridSpec
    F: GaussianSpec
    G: GaussianSpec
    seed: int
    channels: tuple[str, ...]
    coordinatePermutation: tuple[int, ...] | None = None
    hX: float | None = None
    hY: float | None = None

    @property
    def permutation0(self) -> list[int] | None:
        """The coordinate permutation as 0-based indices."""
        if self.coordinatePermutation is None:
            return None
        return [p - 1 for p in self.coordinatePermutation]

    def replace(self, **changes: Any) -> "ExperimentConfig":
        """Copy with fields replaced, re-running validation."""
        data = self.to_mapping()
        for key, value in changes.items():
            if key == "channels":
                value = list(value)
            data[key] = value
        return ExperimentConfig.from_mapping(data)

    def to_mapping(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "d": self.d,
            "n": self.n,
            "m": self.m,
            "bandwidths": {"h": self.bandwidths.h, "epsilons": list(self.bandwidths.epsilons)},
            "mainKernel": self.mainKernel,
            "grid": {
                "lower": self.grid.lower.tolist(),
                "upper": self.grid.upper.tolist(),
                "counts": list(self.grid.counts),
            },
            "F": {"mean": self.F.mean.tolist(), "cov": self.F.cov.tolist()},
            "G": {"mean": self.G.mean.tolist(), "cov": self.G.cov.tolist()},
            "seed": self.seed,
            "channels": list(self.channels),
            "coordinatePermutation": (
                None if self.coordinatePermutation is None else list(self.coordinatePermutation)
            ),
        }
        if self.hX is not None or self.hY is not None:
            out["indirect"] = {"hX": self.hX, "hY": self.hY}
        return out

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, Mapping):
            raise ConfigError("<root>", "config must be a mapping")
        unknown = set(data) - _KEYS
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown key")

        d = _positive_int(data, "d")
        n = _positive_int(data, "n")
        m = _positive_int(data, "m")

        bw = _section(data, "bandwidths")
        try:
            bandwidths = BandwidthSpec(bw.get("h"), tuple(bw.get("epsilons") or ()))
            bandwidths.check_dim(d)
        except (InvalidSpecError, TypeError) as exc:
            raise ConfigError("bandwidths", str(exc)) from None

        kernel = data.get("mainKernel", "boxcar")
        if kernel not in FAMILIES:
            raise ConfigError("mainKernel", f"expected one of {FAMILIES}, got {kernel!r}")

        g = _section(data, "grid")
        try:
            grid = GridSpec(g.get("lower"), g.get("upper"), tuple(g.get("counts") or ()))
        except (InvalidSpecError, TypeError, ValueError) as exc:
            raise ConfigError("grid", str(exc)) from None
        if grid.dim != d:
            raise ConfigError("grid", f"grid dimension {grid.dim} does not match d={d}")

        specs = {}
        for name in ("F", "G"):
            s = _section(data, name)
            try:
                specs[name] = GaussianSpec(s.get("mean"), s.get("cov"))
            except (InvalidSpecError, TypeError, ValueError) as exc:
                raise ConfigError(name, str(exc)) from None
            if specs[name].dim != d:
                raise ConfigError(name, f"dimension {specs[name].dim} does not match d={d}")

        seed = data.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ConfigError("seed", f"expected an unsigned 64-bit integer, got {seed!r}")

        channels = data.get("channels")
        if not channels:
            raise ConfigError("channels", "at least one channel is required")
        channels = tuple("true" if c is True else c for c in channels)
        for c in channels:
            if c not in CHANNELS:
                raise ConfigError("channels", f"unknown channel {c!r}")
        channels = tuple(dict.fromkeys(channels))

        perm = data.get("coordinatePermutation")
        if perm is not None:
            perm = tuple(perm)
            if sorted(perm) != list(range(1, d + 1)):
                raise ConfigError("coordinatePermutation", f"must be a permutation of 1..{d}")

        hX = hY = None
        if data.get("indirect") is not None:
            ind = _section(data, "indirect")
            hX, hY = ind.get("hX"), ind.get("hY")
            for key, v in (("hX", hX), ("hY", hY)):
                if v is not None and not (isinstance(v, (int, float)) and v > 0):
                    raise ConfigError(f"indirect.{key}", "bandwidth must be positive")
            hX = None if hX is None else float(hX)
            hY = None if hY is None else float(hY)

        return cls(d, n, m, bandwidths, kernel, grid, specs["F"], specs["G"], seed, channels, perm, hX, hY)


def _positive_int(data: Mapping, key: str) -> int:
    v = data.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ConfigError(key, f"expected a positive integer, got {v!r}")
    return v


def _section(data: Mapping, key: str) -> Mapping:
    v = data.get(key)
    if not isinstance(v, Mapping):
        raise ConfigError(key, "expected a mapping")
    return v


def load_config(path: str | Path) -> ExperimentConfig:
    """Load a config file; a bare canonical name selects the packaged config."""
    p = Path(path)
    if not p.exists() and str(path) in CANONICAL:
        return canonical_config(str(path))
    with open(p, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError("<root>", f"malformed YAML: {exc}") from None
    return ExperimentConfig.from_mapping(data)


def canonical_config(name: str) -> ExperimentConfig:
    if name not in CANONICAL:
        raise KeyError(f"no canonical config {name!r}; choose from {CANONICAL}")
    text = resources.files("kdre").joinpath("configs", f"{name}.yaml").read_text(encoding="utf-8")
    return ExperimentConfig.from_mapping(yaml.safe_load(text))


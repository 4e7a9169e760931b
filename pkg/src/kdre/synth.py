"""Seeded multivariate normal sampling.

Generator pinned for reproducibility: numpy's ``PCG64`` bit generator seeded
through ``SeedSequence(entropy=seed, spawn_key=(stream_id,))``, standard
normals from ``Generator.standard_normal`` (ziggurat), drawn as one
``(count, d)`` block in row-major order.  Each draw ``u`` is mapped to
``mean + L u`` with ``L`` the lower Cholesky factor, accumulated column by
column without BLAS so the result does not depend on the linear algebra
backend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kdre.core import GaussianSpec, InvalidSpecError, SampleSet

X_STREAM = 0
Y_STREAM = 1
MC_STREAM = 2


@dataclass(frozen=True)
class SeededStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        seed, sid = int(self.seed), int(self.stream_id)
        if not 0 <= seed < 2**64:
            raise InvalidSpecError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if sid < 0:
            raise InvalidSpecError("stream id must be nonnegative")
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "stream_id", sid)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


def sample_mvn(spec: GaussianSpec, count: int, stream: SeededStream) -> SampleSet:
    """Draw ``count`` points from ``N(spec.mean, spec.cov)``."""
    if int(count) < 1:
        raise InvalidSpecError("count must be at least 1")
    u = stream.generator().standard_normal((int(count), spec.dim))
    return SampleSet(transform_standard(spec, u))


def transform_standard(spec: GaussianSpec, u: np.ndarray) -> np.ndarray:
    out = np.broadcast_to(spec.mean, u.shape).copy()
    for k in range(spec.dim):
        out += u[:, k : k + 1] * spec.chol[:, k]
    return out

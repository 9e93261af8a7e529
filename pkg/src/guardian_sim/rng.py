"""Seeded random streams.

All stochastic paths in the simulator draw from `Rng`, a thin wrapper over
numpy's PCG64 bit generator.  Normal variates use numpy's ziggurat sampler;
the method is fixed here so that a given (seed, call sequence) reproduces the
same values bitwise for a fixed numpy version.  Per-trial streams are derived
from a base seed with `derive_seed`, which is stable regardless of execution
order or worker count.
"""
from __future__ import annotations

import numpy as np


class Rng:
    """Deterministic random stream identified by a 64-bit unsigned seed."""

    __slots__ = ("seed", "_gen")

    def __init__(self, seed: int) -> None:
        if seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {seed}")
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def standard_normal(self) -> float:
        return float(self._gen.standard_normal())

    def normal_pair(self, sigma: float) -> tuple[float, float]:
        """Two independent N(0, sigma^2) draws (always consumes two normals,
        even when sigma == 0, to keep streams aligned across noise levels)."""
        g = self._gen
        return sigma * float(g.standard_normal()), sigma * float(g.standard_normal())

    def uniform(self, low: float, high: float) -> float:
        return float(self._gen.uniform(low, high))

    @property
    def generator(self) -> np.random.Generator:
        """Underlying numpy generator, for vectorized bulk draws."""
        return self._gen


def derive_seed(base_seed: int, *key: int) -> int:
    """64-bit child seed for stream `key` of `base_seed`.

    Uses numpy's SeedSequence spawn keys, so children are independent and the
    derivation does not depend on how many other streams exist.
    """
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=tuple(key))
    return int(ss.generate_state(1, np.uint64)[0])

"""Deterministic, platform-independent noise source.

A counter-based generator: a Weyl sequence (seed + k * golden) pushed
through the SplitMix64 finaliser. Chosen over the platform RNG so that
rendered audio is bit-reproducible everywhere; the entire algorithm is
the few lines below, and being counter-based it vectorises.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_2 = np.uint64(0x94D049BB133111EB)
_MASK = 0xFFFFFFFFFFFFFFFF


def _mix(z):
    # SplitMix64 finaliser; all ops deliberately wrap mod 2^64.
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MIX_1
        z = (z ^ (z >> np.uint64(27))) * _MIX_2
        return z ^ (z >> np.uint64(31))


class NoiseSource:
    """Seeded stream of uniform white noise in [-1, 1)."""

    def __init__(self, seed: int):
        self._seed = np.uint64(int(seed) & _MASK)
        self._count = 0

    def uniform(self, n: int) -> np.ndarray:
        """Next n samples, each uniform in [-1, 1)."""
        idx = np.arange(self._count + 1, self._count + n + 1, dtype=np.uint64)
        self._count += n
        with np.errstate(over="ignore"):
            z = _mix(self._seed + idx * _GOLDEN)
        # top 53 bits -> float64 in [0, 1) -> [-1, 1)
        return (z >> np.uint64(11)).astype(np.float64) * (2.0 / (1 << 53)) - 1.0

    def split(self, key: int) -> "NoiseSource":
        """Independent child stream, deterministic in (seed, key)."""
        return NoiseSource(derive_seed(int(self._seed), key))


def derive_seed(seed: int, key: int) -> int:
    """Stable 64-bit child seed for (seed, key)."""
    with np.errstate(over="ignore"):
        child = np.uint64((2 * int(key) + 1) & _MASK) * _GOLDEN
    return int(_mix(np.uint64(int(seed) & _MASK) ^ child))

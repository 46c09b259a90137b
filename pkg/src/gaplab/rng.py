"""Deterministic, seedable uniform variates, bit-identical across platforms.

The generator is SplitMix64 (Steele, Lea & Flood, "Fast Splittable
Pseudorandom Number Generators", OOPSLA 2014; public-domain reference
implementation by Sebastiano Vigna, https://prng.di.unimi.it/splitmix64.c).
It is counter-based in effect: the i-th output is a pure function of
(seed, i), namely mix64(seed + (i+1) * GOLDEN_GAMMA mod 2^64). That makes
replay, skipping and vectorised generation trivial, which is what the
exact-multiset regression tests need.

Variates are 53-bit dyadic rationals u / 2^53 in [0, 1), so every value is
exactly representable as a float64 and as an integer pair (u, 2^53).
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

#: Denominator of every variate: variates are u / 2^53 with 0 <= u < 2^53.
UNIT_DEN = 1 << 53

_TWO53_INV = 1.0 / UNIT_DEN


def mix64(z: int) -> int:
    """SplitMix64 finaliser on a 64-bit integer (Python int in, int out)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def raw_at(seed: int, position: int) -> int:
    """64-bit output at a given stream position, as a pure function."""
    return mix64((seed + (position + 1) * GOLDEN_GAMMA) & MASK64)


def _raw_block(seed: int, start: int, count: int) -> np.ndarray:
    """Vectorised outputs for positions start..start+count-1 (uint64)."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + idx * np.uint64(GOLDEN_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class SeededStream:
    """Single-owner stream of uniform variates on [0, 1).

    Two streams with equal seeds produce identical sequences, and the state
    after n draws depends only on (seed, n). Distinct seeds may be consumed
    in parallel; a single stream must not be shared.
    """

    __slots__ = ("seed", "position")

    def __init__(self, seed: int, position: int = 0):
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if position < 0:
            raise ValueError("position must be nonnegative")
        self.seed = seed
        self.position = position

    def next_raw53(self) -> int:
        """Next variate as an integer numerator over 2^53; advances by 1."""
        u = raw_at(self.seed, self.position) >> 11
        self.position += 1
        return u

    def next_uniform(self) -> float:
        """Next variate in [0, 1) with 53-bit resolution; advances by 1."""
        return self.next_raw53() * _TWO53_INV

    def raw53_block(self, count: int) -> np.ndarray:
        """Next `count` numerators over 2^53 as a uint64 array; advances."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        block = _raw_block(self.seed, self.position, count) >> np.uint64(11)
        self.position += count
        return block

    def uniform_block(self, count: int) -> np.ndarray:
        """Next `count` variates in [0, 1) as a float64 array; advances."""
        return self.raw53_block(count).astype(np.float64) * _TWO53_INV

    def jump_to(self, position: int) -> "SeededStream":
        """Reposition the stream; the result is as if `position` draws happened."""
        if position < 0:
            raise ValueError("position must be nonnegative")
        self.position = position
        return self

"""Seed derivation and the reference random stream.

Every replicate owns an independent xoshiro256** stream. Its 256-bit state is
filled with four consecutive SplitMix64 outputs started from the replicate
seed. Replicate ``i`` of an experiment with master seed ``s`` uses::

    derive_seed(s, i) = mix64(s ^ mix64(i))

where ``mix64(x)`` is the SplitMix64 output function applied to
``x + 0x9E3779B97F4A7C15``. Because seeds depend only on ``(s, i)``, results
do not depend on how replicates are scheduled across workers.

Uniform variates are ``(next() >> 11) * 2**-53`` in [0, 1); exponential
variates of rate ``r`` are ``-log1p(-u) / r``.

The compiled kernel implements the same algorithm; the pure-Python
:class:`Xoshiro256` here is the reference it is tested against.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
TWO_POW_M53 = 1.0 / (1 << 53)


def mix64(x: int) -> int:
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    return mix64((master_seed & MASK64) ^ mix64(index & MASK64))


def derive_seeds(master_seed: int, start: int, count: int) -> np.ndarray:
    return np.array(
        [derive_seed(master_seed, i) for i in range(start, start + count)],
        dtype=np.uint64,
    )


def seed_state(seed: int) -> list[int]:
    """Four SplitMix64 outputs: the xoshiro256** state for ``seed``."""
    state = []
    x = seed & MASK64
    for _ in range(4):
        state.append(mix64(x))
        x = (x + GOLDEN) & MASK64
    return state


class Xoshiro256:
    """xoshiro256** generator (Blackman and Vigna), 64-bit output."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        self.s0, self.s1, self.s2, self.s3 = seed_state(seed)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        x = (s1 * 5) & MASK64
        result = ((((x << 7) | (x >> 57)) & MASK64) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * TWO_POW_M53

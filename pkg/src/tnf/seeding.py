"""Deterministic seed derivation for reproducible sampling.

Every stochastic routine in this package takes an explicit 64-bit master
seed.  Parallel or sharded computations derive one child seed per shard with

    child_seed(master, k) = splitmix64((master + (k + 1) * GOLDEN) mod 2**64)

where GOLDEN = 0x9E3779B97F4A7C15 and splitmix64 is the standard Steele,
Lea, and Flood finalizer.  Shard results are merged by summation, so a run
is bit-reproducible for a fixed (master seed, shard count) pair no matter
how shards are scheduled.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """SplitMix64 avalanche finalizer on a 64-bit integer."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def child_seed(master: int, index: int) -> int:
    """The seed for shard ``index`` of a run with the given master seed."""
    if index < 0:
        raise ValueError("shard index must be nonnegative")
    return splitmix64((master + (index + 1) * GOLDEN) & MASK64)


def generator(seed: int) -> np.random.Generator:
    """A PCG64 generator for one 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & MASK64))

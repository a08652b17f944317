"""Seed derivation.

Every random stream in a run is derived from one 64-bit seed with the
splitmix64 finalizer, so a run is reproducible from its ``seed`` alone and
sweep runs get statistically independent streams.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# Salts separating the streams derived from a single run seed.
TOPOLOGY_SALT = 0x746F706F6C6F6779  # "topology"
ENGINE_SALT = 0x656E67696E650000  # "engine"


def splitmix64(x: int) -> int:
    """One splitmix64 output step applied to ``x`` (64-bit avalanche)."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(*words: int) -> int:
    """Fold integers into one 64-bit seed.

    ``mix(a, b, c) == splitmix64(splitmix64(splitmix64(a) ^ b) ^ c)``; each
    word is reduced modulo 2**64 first.
    """
    if not words:
        raise ValueError("mix() needs at least one word")
    h = splitmix64(words[0] & MASK64)
    for w in words[1:]:
        h = splitmix64(h ^ (w & MASK64))
    return h


def topology_seed(seed: int) -> int:
    return mix(seed, TOPOLOGY_SALT)


def engine_seed(seed: int) -> int:
    return mix(seed, ENGINE_SALT)


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))

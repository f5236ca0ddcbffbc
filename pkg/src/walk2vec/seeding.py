"""Deterministic seeding utilities.

Philox is counter-based, so a 64-bit (seed, stream) key fully determines the
draw sequence on every platform. Derived seeds chain splitmix64 over the mix
inputs; both algorithms are published and stable.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, Philox

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def philox_rng(seed: int, stream: int = 0) -> Generator:
    """Generator keyed by (seed, stream), both reduced mod 2^64."""
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return Generator(Philox(key=key))


def splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix64(*values: int) -> int:
    """Chained splitmix64 over the inputs; order-sensitive, 64-bit output."""
    h = _GOLDEN
    for v in values:
        h = splitmix64(h ^ (v & _MASK64))
    return h

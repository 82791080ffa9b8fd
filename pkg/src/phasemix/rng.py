"""Deterministic, portable random streams.

All randomness in the package flows through PCG64 generators whose seeds are
derived from a single 64-bit master seed with the SplitMix64 hash.  The split
rule is purely arithmetic (no process state), so a sweep produces identical
results regardless of machine, worker count, or scheduling:

    stream(master, a, b, ...) == PCG64(splitmix chain over (a, b, ...))

Indices may be integers or short strings (strings are folded to 64 bits).
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return (x ^ (x >> 31)) & _MASK


def _fold(part: int | str) -> int:
    if isinstance(part, str):
        acc = 0
        for ch in part.encode("utf-8"):
            acc = _splitmix64(acc ^ ch)
        return acc
    return part & _MASK


def derive_seed(master: int, *parts: int | str) -> int:
    """Hash a master seed and a path of indices into a new 64-bit seed."""
    x = _fold(master)
    for part in parts:
        x = _splitmix64(x ^ _fold(part))
    return _splitmix64(x)


def stream(master: int, *parts: int | str) -> np.random.Generator:
    """Independent PCG64 generator for the given seed path."""
    return np.random.Generator(np.random.PCG64(derive_seed(master, *parts)))

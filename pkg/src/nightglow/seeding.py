"""Deterministic 64-bit seed derivation.

All randomness in the toolkit flows through numpy Generators seeded from
values produced here, so a master seed plus stable identifiers (scene id,
variant index, stream tag) reproduces every sampled quantity on any
platform. Mixing uses the SplitMix64 finalizer, which has full avalanche
behaviour and needs no state beyond a single uint64.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One SplitMix64 scrambling step of a 64-bit value."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return (x ^ (x >> 31)) & _MASK


def derive_seed(master: int, *parts: int | str) -> int:
    """Mix a master seed with identifying parts into a new 64-bit seed.

    Strings are absorbed as UTF-8 bytes in 8-byte little-endian chunks;
    integers are absorbed directly. Order matters.
    """
    state = splitmix64(master & _MASK)
    for part in parts:
        if isinstance(part, str):
            data = part.encode("utf-8")
            for i in range(0, len(data), 8):
                chunk = int.from_bytes(data[i : i + 8], "little")
                state = splitmix64(state ^ chunk)
            state = splitmix64(state ^ len(data))
        else:
            state = splitmix64(state ^ (int(part) & _MASK))
    return state


def make_rng(seed: int) -> np.random.Generator:
    """Create the toolkit's standard generator for a derived seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK))

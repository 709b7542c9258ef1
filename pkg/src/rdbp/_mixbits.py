"""Counter-based uniform streams.

Every random number in the package is a pure function of a five-part key
(seed, stream, run, generation, slot).  There is no mutable generator
state: a process that needs the draw for slot 7 of generation 12 computes
it directly, so coupled processes (same seed, different policies) read the
same underlying randomness by construction, and replays are exact.

The hash is the splitmix64 finalizer applied along a short absorption
chain.  Integer arithmetic is exact in both the Python-int and the uint64
array form, so the scalar and vectorized paths agree bit for bit; the
compiled backend mirrors the same operations in C.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# 2**-53: maps the top 53 bits of the hash onto [0, 1).
_INV53 = 1.0 / 9007199254740992.0

# Stream labels keep offspring, claim, and resource draws independent even
# when they share (seed, run, generation, slot).
OFFSPRING_STREAM = 0x11
CLAIM_STREAM = 0x22
RESOURCE_STREAM = 0x33


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer (exact, Python ints)."""
    z = (z + _GOLDEN) & MASK64
    z ^= z >> 30
    z = (z * _MIX1) & MASK64
    z ^= z >> 27
    z = (z * _MIX2) & MASK64
    return z ^ (z >> 31)


def stream_prefix(seed: int, stream: int, run: int, generation: int) -> int:
    """Absorb everything but the slot; the per-slot tail mix is cheap."""
    h = mix64((seed ^ _GOLDEN) & MASK64)
    h = mix64(h ^ (stream & MASK64))
    h = mix64(h ^ (run & MASK64))
    return mix64(h ^ (generation & MASK64))


def uniform_at(seed: int, stream: int, run: int, generation: int, slot: int) -> float:
    h = mix64(stream_prefix(seed, stream, run, generation) ^ (slot & MASK64))
    return (h >> 11) * _INV53


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # uint64 array ops wrap modulo 2**64, matching the masked Python ints.
    z = z + _GOLDEN
    z = z ^ (z >> 30)
    z = z * _MIX1
    z = z ^ (z >> 27)
    z = z * _MIX2
    return z ^ (z >> 31)


def uniforms(seed: int, stream: int, run: int, generation: int, count: int,
             first_slot: int = 0) -> np.ndarray:
    """Vectorized `uniform_at` over slots [first_slot, first_slot + count)."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    prefix = stream_prefix(seed, stream, run, generation)
    slots = np.arange(first_slot, first_slot + count, dtype=np.uint64)
    h = _mix64_array(prefix ^ slots)
    return (h >> np.uint64(11)).astype(np.float64) * _INV53

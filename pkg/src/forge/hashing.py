"""Deterministic 64-bit hashing shared by fingerprints and environment keys.

The mixer is splitmix64 (Steele, Lea & Flood's SplittableRandom finalizer,
with the constants popularized by Vigna). It is used instead of Python's
builtin ``hash`` so that every identifier is stable across processes,
platforms, and ``PYTHONHASHSEED`` settings.
"""

from __future__ import annotations

from collections.abc import Iterable

MASK64 = (1 << 64) - 1

# Fixed seed for all derived identifiers; changing it changes every
# fingerprint and environment key in the artifact.
HASH_SEED = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finalizer: bijective 64-bit mixing."""
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def hash_ints(values: Iterable[int], seed: int = HASH_SEED) -> int:
    """Hash a sequence of integers into one 64-bit identifier.

    Order-sensitive; callers wanting order invariance sort first.
    """
    h = seed & MASK64
    n = 0
    for v in values:
        h = mix64(h ^ (v & MASK64))
        n += 1
    return mix64(h ^ n)


def hash_str(text: str, seed: int = HASH_SEED) -> int:
    """Hash a unicode string via its UTF-8 bytes, 8 bytes per round."""
    data = text.encode("utf-8")
    chunks = (
        int.from_bytes(data[i : i + 8], "little") for i in range(0, len(data), 8)
    )
    return hash_ints(chunks, seed=mix64(seed ^ len(data)))

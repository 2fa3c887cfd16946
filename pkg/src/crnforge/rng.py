"""Counter-based splittable random number generation.

The generator is SplitMix64 used in counter mode: draw i of stream with
key k is mix64(k + (i + 1) * GOLDEN) where mix64 is the SplitMix64
finalizer. Sub-streams are derived by hashing the master seed with the
stream indices (stream_key), so trial t of a run is reproducible from
(seed, t) alone, independent of thread scheduling.

The numba simulation kernel re-implements the same arithmetic on
np.uint64; test_kinetics cross-checks the two implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
STREAM_SALT = 0xD2B74407B1CE6E93

# 2^-53: turns the top 53 bits of a draw into a double in [0, 1).
_INV53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def raw64(key: int, counter: int) -> int:
    """The counter-th 64-bit draw of the stream with the given key."""
    return mix64((key + ((counter + 1) * GOLDEN)) & MASK64)


def stream_key(seed: int, *indices: int) -> int:
    """Derive a sub-stream key from a master seed and index path.

    Each level folds one index: key <- mix64(mix64(key) + index * SALT).
    """
    key = mix64(seed & MASK64)
    for index in indices:
        key = mix64((mix64(key) + (index & MASK64) * STREAM_SALT) & MASK64)
    return key


@dataclass
class Stream:
    """A consumable view of one counter-based stream."""

    key: int
    counter: int = 0

    def next_raw(self) -> int:
        value = raw64(self.key, self.counter)
        self.counter += 1
        return value

    def uniform(self) -> float:
        """Double in [0, 1)."""
        return (self.next_raw() >> 11) * _INV53

    def exponential(self, rate: float) -> float:
        u = self.uniform()
        return -math.log1p(-u) / rate

"""Counter-based 64-bit mixing (SplitMix64) used for every derived seed.

Constants are the published SplitMix64 ones:

* increment ``0x9E3779B97F4A7C15`` (golden-ratio Weyl step),
* multipliers ``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB``,
* shifts 30, 27, 31.

``stream(key, i)`` equals the ``i``-th output of a SplitMix64 generator
seeded with ``key``, so any element can be produced independently of the
others.  That is what makes parallel and serial runs agree bit for bit.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def fmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream(key: int, index: int) -> int:
    return fmix64(key + (index + 1) * GOLDEN)


def mix(*values: int) -> int:
    """Fold integers into one 64-bit seed, order-sensitively."""
    h = 0
    for v in values:
        h = fmix64((h ^ (int(v) & MASK64)) + GOLDEN)
    return h


def stream_array(key: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start .. start+count-1`` of ``stream(key, .)`` as uint64."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key & MASK64) + idx * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def to_unit_open(z: np.ndarray) -> np.ndarray:
    """Map uint64 draws to floats in (0, 1]."""
    return ((z >> np.uint64(11)).astype(np.float64) + 1.0) * (1.0 / (1 << 53))

"""Exact-length bit sequences.

Bits are stored most-significant-first everywhere: ``BitString("0101")`` has
``bits[0] == 0`` and converts to the integer 5.  Every codec in the package
consumes and produces :class:`BitString` values (or plain ``uint8`` arrays in
the hot simulator path, via :meth:`BitString.to_numpy`).
"""

from __future__ import annotations

from typing import Iterable, Union

import numpy as np

BitsLike = Union["BitString", str, Iterable[int], np.ndarray]


class BitString:
    """Immutable sequence of binary digits with an exact bit length."""

    __slots__ = ("_bits",)

    def __init__(self, bits: BitsLike = ()):
        if isinstance(bits, BitString):
            arr = bits._bits
        elif isinstance(bits, str):
            cleaned = bits.replace(" ", "").replace("_", "")
            if cleaned.strip("01"):
                raise ValueError(f"bit string may only contain '0'/'1': {bits!r}")
            arr = np.frombuffer(cleaned.encode("ascii"), dtype=np.uint8) - ord("0")
        else:
            arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
            if arr.size and not np.isin(arr, (0, 1)).all():
                raise ValueError("bits must be 0 or 1")
            arr = arr.astype(np.uint8).ravel()
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.flags.writeable = False
        self._bits = arr

    @classmethod
    def from_int(cls, value: int, width: int) -> "BitString":
        if value < 0 or value >= (1 << width):
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls(format(value, f"0{width}b") if width else "")

    @classmethod
    def concat(cls, *parts: BitsLike) -> "BitString":
        arrays = [BitString(p)._bits for p in parts]
        return cls(np.concatenate(arrays) if arrays else ())

    def to_int(self) -> int:
        return int(str(self), 2) if len(self) else 0

    def to_numpy(self) -> np.ndarray:
        """Read-only ``uint8`` view of the bits."""
        return self._bits

    def __len__(self) -> int:
        return int(self._bits.size)

    def __iter__(self):
        return (int(b) for b in self._bits)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return BitString(self._bits[idx])
        return int(self._bits[idx])

    def __add__(self, other: BitsLike) -> "BitString":
        return BitString(np.concatenate([self._bits, BitString(other)._bits]))

    def __xor__(self, other: BitsLike) -> "BitString":
        other = BitString(other)
        if len(other) != len(self):
            raise ValueError("xor needs equal lengths")
        return BitString(self._bits ^ other._bits)

    def __invert__(self) -> "BitString":
        return BitString(self._bits ^ 1)

    def __eq__(self, other) -> bool:
        if isinstance(other, str):
            try:
                other = BitString(other)
            except ValueError:
                return NotImplemented
        if not isinstance(other, BitString):
            return NotImplemented
        return self._bits.size == other._bits.size and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash((self._bits.size, self._bits.tobytes()))

    def __str__(self) -> str:
        return (self._bits + ord("0")).tobytes().decode("ascii")

    def __repr__(self) -> str:
        return f"BitString('{self}')"

    def weight(self) -> int:
        return int(self._bits.sum())


def hamming_distance(a: BitsLike, b: BitsLike) -> int:
    """Count positions where ``a`` and ``b`` differ.

    Raises ``ValueError`` when the lengths differ; callers must align the
    streams (strip padding) before comparing.
    """
    a_arr = BitString(a).to_numpy() if not isinstance(a, np.ndarray) else a
    b_arr = BitString(b).to_numpy() if not isinstance(b, np.ndarray) else b
    if a_arr.size != b_arr.size:
        raise ValueError(f"length mismatch: {a_arr.size} vs {b_arr.size}; align streams first")
    return int(np.count_nonzero(a_arr != b_arr))


def pad_to_multiple(x: BitsLike, block: int, fill: int = 0) -> BitString:
    """Extend ``x`` with ``fill`` bits up to the next multiple of ``block``."""
    if block < 1:
        raise ValueError("block must be >= 1")
    if fill not in (0, 1):
        raise ValueError("fill must be 0 or 1")
    x = BitString(x)
    short = (-len(x)) % block
    if not short:
        return x
    return BitString(np.concatenate([x.to_numpy(), np.full(short, fill, dtype=np.uint8)]))

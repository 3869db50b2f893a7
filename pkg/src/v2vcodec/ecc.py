"""Blockwise error-control codes: Hamming(7,4), Tornado(12,7), data negation.

Block functions take and return :class:`BitString`; the ``*_stream``
helpers work on ``uint8`` arrays, pad the input with zeros to whole blocks
and aggregate per-block decoder status.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .bits import BitString, BitsLike
from .errors import BlockLengthError, ConstructionError


class Status(str, Enum):
    CLEAN = "clean"
    CORRECTED = "corrected"
    FAIL = "fail"
    DETECTED = "detected_uncorrectable"


class BlockResult(NamedTuple):
    """Decoded data bits plus decoder verdict.

    ``detail`` is the 1-indexed flipped position for Hamming and negation,
    and the number of flipped bits for Tornado; ``None`` otherwise.
    """

    data: BitString
    status: Status
    detail: Optional[int] = None


def _block(bits: BitsLike, n: int) -> np.ndarray:
    arr = BitString(bits).to_numpy()
    if arr.size != n:
        raise BlockLengthError(f"expected a {n}-bit block, got {arr.size}")
    return arr


# ---------------------------------------------------------------------------
# Hamming(7,4): positions 1..7, parity at 1, 2, 4, even parity

_HAMMING_DATA_POS = (3, 5, 6, 7)


def hamming_encode(block: BitsLike) -> BitString:
    d = _block(block, 4)
    word = [0] * 8  # index 0 unused
    for pos, bit in zip(_HAMMING_DATA_POS, d):
        word[pos] = int(bit)
    for p in (1, 2, 4):
        word[p] = sum(word[i] for i in range(1, 8) if i & p and i != p) & 1
    return BitString(word[1:])


def _hamming_syndrome(word: np.ndarray) -> int:
    s = 0
    for p in (1, 2, 4):
        if sum(int(word[i - 1]) for i in range(1, 8) if i & p) & 1:
            s |= p
    return s


def hamming_decode(block: BitsLike) -> BlockResult:
    """Syndrome read as a position; flip it. Double errors miscorrect silently."""
    word = np.array(_block(block, 7))
    s = _hamming_syndrome(word)
    if s:
        word[s - 1] ^= 1
    data = BitString(word[[p - 1 for p in _HAMMING_DATA_POS]])
    if s == 0:
        return BlockResult(data, Status.CLEAN)
    return BlockResult(data, Status.CORRECTED, s)


# ---------------------------------------------------------------------------
# Tornado(12,7)

# check -> data indices (0-based); the fifth check covers the first four checks
DEFAULT_TORNADO_CHECKS = ((0, 1, 2), (2, 3, 4), (4, 5, 6), (0, 3, 6))


@dataclass(frozen=True)
class TornadoGraph:
    """Two-layer bipartite (12,7) structure and its syndrome decoder.

    ``checks`` lists, for each first-layer check bit, the data bits it XORs;
    a final check XORs all first-layer checks.  The syndrome table keeps only
    syndromes whose minimum-weight error pattern is unique (weight <= 2);
    every other nonzero syndrome is reported as detected-uncorrectable.
    """

    checks: Tuple[Tuple[int, ...], ...] = DEFAULT_TORNADO_CHECKS
    k: int = 7
    H: np.ndarray = field(init=False, repr=False, compare=False)
    syndrome_table: Dict[int, Tuple[int, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.n
        H = np.zeros((len(self.checks) + 1, n), dtype=np.uint8)
        for r, ds in enumerate(self.checks):
            H[r, list(ds)] = 1
            H[r, self.k + r] = 1
        H[-1, self.k:] = 1
        cols = [self._col(H, j) for j in range(n)]
        if 0 in cols or len(set(cols)) != n:
            raise ConstructionError("parity-check columns must be nonzero and distinct")
        H.flags.writeable = False
        object.__setattr__(self, "H", H)

        by_syndrome: Dict[int, List[Tuple[int, ...]]] = {}
        for w in (1, 2):
            for pos in combinations(range(n), w):
                s = 0
                for j in pos:
                    s ^= cols[j]
                if s in by_syndrome and len(by_syndrome[s][0]) < w:
                    continue
                by_syndrome.setdefault(s, []).append(pos)
        table = {s: pats[0] for s, pats in by_syndrome.items() if len(pats) == 1 and s}
        object.__setattr__(self, "syndrome_table", table)

    @property
    def n(self) -> int:
        return self.k + len(self.checks) + 1

    @staticmethod
    def _col(H: np.ndarray, j: int) -> int:
        v = 0
        for bit in H[:, j]:
            v = (v << 1) | int(bit)
        return v

    def syndrome(self, word: np.ndarray) -> int:
        v = 0
        for bit in (self.H.astype(np.int64) @ word.astype(np.int64)) & 1:
            v = (v << 1) | int(bit)
        return v

    def parity(self, data: np.ndarray) -> np.ndarray:
        c = np.array([int(data[list(ds)].sum() & 1) for ds in self.checks], dtype=np.uint8)
        return np.append(c, np.uint8(c.sum() & 1))


@lru_cache(maxsize=None)
def default_tornado_graph() -> TornadoGraph:
    return TornadoGraph()


def tornado_encode(block: BitsLike, g: Optional[TornadoGraph] = None) -> BitString:
    g = g or default_tornado_graph()
    d = _block(block, g.k)
    return BitString(np.concatenate([d, g.parity(d)]))


def tornado_decode(block: BitsLike, g: Optional[TornadoGraph] = None) -> BlockResult:
    g = g or default_tornado_graph()
    word = np.array(_block(block, g.n))
    s = g.syndrome(word)
    if s == 0:
        return BlockResult(BitString(word[:g.k]), Status.CLEAN)
    pattern = g.syndrome_table.get(s)
    if pattern is None:
        return BlockResult(BitString(word[:g.k]), Status.DETECTED)
    word[list(pattern)] ^= 1
    return BlockResult(BitString(word[:g.k]), Status.CORRECTED, len(pattern))


# ---------------------------------------------------------------------------
# data negation: 8 data bits + 8 redundancy bits


def negation_encode(block: BitsLike) -> BitString:
    d = _block(block, 8)
    r = d ^ 1 if int(d.sum()) & 1 else d
    return BitString(np.concatenate([d, r]))


def negation_decode(block: BitsLike) -> BlockResult:
    """Majority vote over data XOR redundancy.

    The majority value of the XOR says which rule the encoder applied (0 for
    an even-weight block, 1 for odd).  Minority positions are visited in
    order; a data flip is kept only if it makes the data parity agree with
    the voted rule, otherwise the error is charged to the redundancy half.
    ``detail`` is the 1-indexed position within the 16 bits.
    """
    word = _block(block, 16)
    d = np.array(word[:8])
    x = d ^ word[8:]
    ones = int(x.sum())
    odd = int(d.sum()) & 1
    if (ones == 0 and not odd) or (ones == 8 and odd):
        return BlockResult(BitString(d), Status.CLEAN)
    if ones == 4:
        return BlockResult(BitString(d), Status.DETECTED)
    pattern = 1 if ones > 4 else 0
    first = None
    for j in np.flatnonzero(x != pattern):
        if (odd ^ 1) == pattern:
            d[j] ^= 1
            odd ^= 1
            first = first or int(j) + 1
        elif first is None:
            first = int(j) + 9
    if first is None:
        # XOR is uniform but disagrees with the data parity: parity lies in data
        return BlockResult(BitString(d), Status.DETECTED)
    return BlockResult(BitString(d), Status.CORRECTED, first)


# ---------------------------------------------------------------------------
# stream helpers


@dataclass(frozen=True)
class BlockCode:
    name: str
    k: int
    n: int
    encode: Callable[[BitsLike], BitString]
    decode: Callable[[BitsLike], BlockResult]


ECC_CODES: Dict[str, BlockCode] = {
    "hamming": BlockCode("hamming", 4, 7, hamming_encode, hamming_decode),
    "tornado": BlockCode("tornado", 7, 12, tornado_encode, tornado_decode),
    "negation": BlockCode("negation", 8, 16, negation_encode, negation_decode),
}


@lru_cache(maxsize=None)
def _encode_table(name: str) -> np.ndarray:
    code = ECC_CODES[name]
    table = np.zeros((1 << code.k, code.n), dtype=np.uint8)
    for v in range(1 << code.k):
        table[v] = code.encode(BitString.from_int(v, code.k)).to_numpy()
    return table


@lru_cache(maxsize=None)
def _decode_table(name: str) -> Tuple[np.ndarray, np.ndarray]:
    """Exhaustive lookup: received word -> (data bits, status code)."""
    code = ECC_CODES[name]
    statuses = list(Status)
    data = np.zeros((1 << code.n, code.k), dtype=np.uint8)
    status = np.zeros(1 << code.n, dtype=np.uint8)
    for v in range(1 << code.n):
        res = code.decode(BitString.from_int(v, code.n))
        data[v] = res.data.to_numpy()
        status[v] = statuses.index(res.status)
    return data, status


def _weights(n: int) -> np.ndarray:
    return (1 << np.arange(n - 1, -1, -1)).astype(np.int64)


def ecc_encode_stream(name: str, bits: np.ndarray) -> np.ndarray:
    """Pad to whole ``k``-bit blocks and encode every block."""
    code = ECC_CODES[name]
    bits = np.asarray(bits, dtype=np.uint8)
    pad = (-bits.size) % code.k
    blocks = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)]).reshape(-1, code.k)
    return _encode_table(name)[blocks.astype(np.int64) @ _weights(code.k)].ravel()


def ecc_decode_stream(name: str, bits: np.ndarray) -> Tuple[np.ndarray, Dict[str, int]]:
    """Decode whole ``n``-bit blocks; returns the data stream and status counts."""
    code = ECC_CODES[name]
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % code.n:
        raise BlockLengthError(f"{bits.size} bits is not a whole number of {code.n}-bit blocks")
    data, status = _decode_table(name)
    idx = bits.reshape(-1, code.n).astype(np.int64) @ _weights(code.n)
    counts = np.bincount(status[idx], minlength=len(Status))
    return data[idx].ravel(), {s.value: int(c) for s, c in zip(Status, counts)}

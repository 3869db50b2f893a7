"""General-purpose lossless text coders over the alphabet ``a-z`` plus space.

Three coders live here:

* static Huffman coding from a fixed frequency table,
* integer arithmetic coding (32-bit registers, interval rescaling) with an
  8-bit character-count header,
* LZW with a 4-bit header carrying the fixed code width.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Tuple, Union

from .bits import BitString, BitsLike
from .errors import (
    AlphabetError,
    CodebookParseError,
    CodeWidthError,
    DanglingSuffixError,
    InvalidCodeError,
    MessageTooLongError,
    TruncatedTagError,
)

ALPHABET = "abcdefghijklmnopqrstuvwxyz "
SYMBOL_INDEX = {s: i for i, s in enumerate(ALPHABET)}


def _check_alphabet(text: str) -> None:
    for ch in text:
        if ch not in SYMBOL_INDEX:
            raise AlphabetError(ch)


# ---------------------------------------------------------------------------
# frequency tables


@dataclass(frozen=True)
class FrequencyTable:
    """Probability per symbol; all 27 symbols present, each strictly positive."""

    probs: Tuple[float, ...]

    def __post_init__(self):
        if len(self.probs) != len(ALPHABET):
            raise ValueError(f"need {len(ALPHABET)} probabilities, got {len(self.probs)}")
        if any(not p > 0 for p in self.probs):
            raise ValueError("every probability must be > 0")
        if abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {math.fsum(self.probs)!r}, not 1")

    @classmethod
    def from_counts(cls, counts: Mapping[str, float]) -> "FrequencyTable":
        total = math.fsum(counts.get(s, 0) for s in ALPHABET)
        probs = [counts.get(s, 0) / total for s in ALPHABET]
        # renormalise so the float sum lands on 1 within rounding
        s = math.fsum(probs)
        return cls(tuple(p / s for p in probs))

    def items(self):
        return zip(ALPHABET, self.probs)

    def __getitem__(self, symbol: str) -> float:
        return self.probs[SYMBOL_INDEX[symbol]]

    def entropy(self) -> float:
        return -math.fsum(p * math.log2(p) for p in self.probs)


def corpus_frequency_table(texts: Iterable[str]) -> FrequencyTable:
    """Symbol counts over ``texts`` plus one pseudo-count per symbol."""
    counts = Counter({s: 1 for s in ALPHABET})
    for t in texts:
        _check_alphabet(t)
        counts.update(t)
    return FrequencyTable.from_counts(counts)


def default_frequency_table() -> FrequencyTable:
    from .codebook import load_codebook

    return corpus_frequency_table(m.text for m in load_codebook())


def load_frequency_table(path: Union[str, Path]) -> FrequencyTable:
    """Parse 27 ``symbol,probability`` lines; space is written ``SP``."""
    counts: Dict[str, float] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise CodebookParseError(f"cannot read frequency table {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            sym, prob = line.split(",")
            sym = sym.strip()
            sym = " " if sym == "SP" else sym
            if sym not in SYMBOL_INDEX or sym in counts:
                raise ValueError(f"bad or repeated symbol {sym!r}")
            counts[sym] = float(prob)
        except ValueError as exc:
            raise CodebookParseError(f"{path}:{n}: {exc}") from exc
    if len(counts) != len(ALPHABET):
        raise CodebookParseError(f"{path}: expected {len(ALPHABET)} symbols, got {len(counts)}")
    return FrequencyTable(tuple(counts[s] for s in ALPHABET))


# ---------------------------------------------------------------------------
# Huffman


@dataclass(frozen=True)
class PrefixCodeTable:
    codes: Mapping[str, BitString]
    _reverse: Dict[str, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_reverse", {str(cw): s for s, cw in self.codes.items()})

    def __getitem__(self, symbol: str) -> BitString:
        return self.codes[symbol]

    def lengths(self) -> Dict[str, int]:
        return {s: len(cw) for s, cw in self.codes.items()}

    def kraft_sum(self) -> float:
        return math.fsum(2.0 ** -len(cw) for cw in self.codes.values())

    def expected_length(self, weights: Mapping[str, float]) -> float:
        return math.fsum(weights[s] * len(cw) for s, cw in self.codes.items())


def build_huffman(freq: Union[FrequencyTable, Mapping[str, float]]) -> PrefixCodeTable:
    """Static Huffman code.

    Merges always take the two lightest nodes; equal weights are resolved by
    creation index (leaves first, in alphabet order, then internal nodes in
    the order they were created).  The first node popped gets branch bit 0.
    """
    items = list(freq.items())
    if not items:
        return PrefixCodeTable({})
    if len(items) == 1:
        return PrefixCodeTable({items[0][0]: BitString("0")})
    order = sorted(range(len(items)), key=lambda i: SYMBOL_INDEX.get(items[i][0], len(ALPHABET) + i))
    heap: List[Tuple[float, int]] = []
    children: Dict[int, Tuple[int, int]] = {}
    leaf_symbol: Dict[int, str] = {}
    for idx, i in enumerate(order):
        sym, w = items[i]
        leaf_symbol[idx] = sym
        heap.append((w, idx))
    heapq.heapify(heap)
    next_id = len(items)
    while len(heap) > 1:
        w0, n0 = heapq.heappop(heap)
        w1, n1 = heapq.heappop(heap)
        children[next_id] = (n0, n1)
        heapq.heappush(heap, (w0 + w1, next_id))
        next_id += 1

    codes: Dict[str, BitString] = {}
    stack = [(heap[0][1], "")]
    while stack:
        node, prefix = stack.pop()
        if node in children:
            zero, one = children[node]
            stack.append((zero, prefix + "0"))
            stack.append((one, prefix + "1"))
        else:
            codes[leaf_symbol[node]] = BitString(prefix)
    return PrefixCodeTable({s: codes[s] for s, _ in items})


def huffman_encode(text: str, table: PrefixCodeTable) -> BitString:
    parts = []
    for ch in text:
        if ch not in table.codes:
            raise AlphabetError(ch)
        parts.append(str(table.codes[ch]))
    return BitString("".join(parts))


def huffman_decode(bits: BitsLike, table: PrefixCodeTable) -> str:
    reverse = table._reverse
    out = []
    cur = ""
    for ch in str(BitString(bits)):
        cur += ch
        sym = reverse.get(cur)
        if sym is not None:
            out.append(sym)
            cur = ""
    if cur:
        raise DanglingSuffixError(f"trailing bits {cur!r} complete no codeword")
    return "".join(out)


# ---------------------------------------------------------------------------
# arithmetic coding

_REG_BITS = 32
_TOP = (1 << _REG_BITS) - 1
_HALF = 1 << (_REG_BITS - 1)
_QUARTER = 1 << (_REG_BITS - 2)
_COUNT_TOTAL = 1 << 14
LENGTH_HEADER_BITS = 8


def quantized_counts(freq: FrequencyTable, total: int = _COUNT_TOTAL) -> Tuple[int, ...]:
    """Integer counts summing to ``total``, at least 1 per symbol."""
    counts = [max(1, int(p * total)) for p in freq.probs]
    diff = total - sum(counts)
    # hand the rounding slack to (or take it from) the most frequent symbol
    big = max(range(len(counts)), key=lambda i: (counts[i], -i))
    counts[big] += diff
    if counts[big] < 1:
        raise ValueError("frequency table cannot be quantized")
    return tuple(counts)


def _cumulative(freq: FrequencyTable) -> List[int]:
    cum = [0]
    for c in quantized_counts(freq):
        cum.append(cum[-1] + c)
    return cum


def arithmetic_encode(text: str, freq: FrequencyTable) -> BitString:
    """8-bit character count followed by the arithmetic tag."""
    _check_alphabet(text)
    if len(text) > 255:
        raise MessageTooLongError(f"{len(text)} characters exceeds the 8-bit length header")
    cum = _cumulative(freq)
    total = cum[-1]
    low, high, pending = 0, _TOP, 0
    out: List[str] = [format(len(text), "08b")]

    def emit(bit: str):
        nonlocal pending
        out.append(bit)
        out.append(("1" if bit == "0" else "0") * pending)
        pending = 0

    for ch in text:
        s = SYMBOL_INDEX[ch]
        span = high - low + 1
        high = low + span * cum[s + 1] // total - 1
        low = low + span * cum[s] // total
        while True:
            if high < _HALF:
                emit("0")
            elif low >= _HALF:
                emit("1")
                low -= _HALF
                high -= _HALF
            elif low >= _QUARTER and high < _HALF + _QUARTER:
                pending += 1
                low -= _QUARTER
                high -= _QUARTER
            else:
                break
            low = 2 * low
            high = 2 * high + 1
    if text:
        pending += 1
        emit("0" if low < _QUARTER else "1")
    return BitString("".join(out))


def arithmetic_decode_consumed(bits: BitsLike, freq: FrequencyTable) -> Tuple[str, int]:
    """Decode and report how many input bits the encoder produced for it."""
    bits = str(BitString(bits))
    if len(bits) < LENGTH_HEADER_BITS:
        raise TruncatedTagError("missing the 8-bit length header")
    n = int(bits[:LENGTH_HEADER_BITS], 2)
    tag = bits[LENGTH_HEADER_BITS:]
    if n == 0:
        return "", LENGTH_HEADER_BITS
    cum = _cumulative(freq)
    total = cum[-1]

    pos = 0

    def next_bit() -> int:
        nonlocal pos
        b = 1 if pos < len(tag) and tag[pos] == "1" else 0
        pos += 1
        return b

    value = 0
    for _ in range(_REG_BITS):
        value = (value << 1) | next_bit()
    low, high, shifts = 0, _TOP, 0
    out = []
    for _ in range(n):
        span = high - low + 1
        scaled = ((value - low + 1) * total - 1) // span
        # linear scan is fine for 27 symbols
        s = 0
        while cum[s + 1] <= scaled:
            s += 1
        out.append(ALPHABET[s])
        high = low + span * cum[s + 1] // total - 1
        low = low + span * cum[s] // total
        while True:
            if high < _HALF:
                pass
            elif low >= _HALF:
                low -= _HALF
                high -= _HALF
                value -= _HALF
            elif low >= _QUARTER and high < _HALF + _QUARTER:
                low -= _QUARTER
                high -= _QUARTER
                value -= _QUARTER
            else:
                break
            low = 2 * low
            high = 2 * high + 1
            value = (value << 1) | next_bit()
            shifts += 1
    if len(tag) < min_tag_bits(n, freq):
        raise TruncatedTagError(f"header promises {n} symbols but only {len(tag)} tag bits follow")
    return "".join(out), LENGTH_HEADER_BITS + min(shifts + 2, len(tag))


def min_tag_bits(n: int, freq: FrequencyTable) -> int:
    """Lower bound on the tag length of any ``n``-symbol message.

    Every symbol narrows the interval by at least the largest quantized
    probability and the final interval still spans a quarter of the
    register, so the encoder emits at least ``n * log2(total / c_max)``
    bits; one bit of slack covers integer rounding.
    """
    if n == 0:
        return 0
    counts = quantized_counts(freq)
    return max(2, math.floor(n * math.log2(sum(counts) / max(counts))) - 1)


def arithmetic_decode(bits: BitsLike, freq: FrequencyTable) -> str:
    return arithmetic_decode_consumed(bits, freq)[0]


# ---------------------------------------------------------------------------
# LZW

LZW_HEADER_BITS = 4
LZW_MIN_WIDTH = 5


def lzw_codes(text: str) -> List[int]:
    """Greedy longest-match code indices for ``text``."""
    _check_alphabet(text)
    table = {s: i for i, s in enumerate(ALPHABET)}
    codes: List[int] = []
    cur = ""
    for ch in text:
        cand = cur + ch
        if cand in table:
            cur = cand
        else:
            codes.append(table[cur])
            table[cand] = len(table)
            cur = ch
    if cur:
        codes.append(table[cur])
    return codes


def lzw_encode(text: str) -> BitString:
    codes = lzw_codes(text)
    width = max(LZW_MIN_WIDTH, max(codes, default=0).bit_length())
    if width >= 1 << LZW_HEADER_BITS:
        raise CodeWidthError(f"code width {width} does not fit the 4-bit header")
    return BitString(format(width, "04b") + "".join(format(c, f"0{width}b") for c in codes))


def lzw_decode(bits: BitsLike) -> str:
    bits = str(BitString(bits))
    if len(bits) < LZW_HEADER_BITS:
        raise InvalidCodeError("missing the 4-bit width header")
    width = int(bits[:LZW_HEADER_BITS], 2)
    if width < LZW_MIN_WIDTH:
        raise CodeWidthError(f"header width {width} is below the minimum {LZW_MIN_WIDTH}")
    body = bits[LZW_HEADER_BITS:]
    if len(body) % width:
        raise InvalidCodeError(f"{len(body)} code bits are not a multiple of width {width}")
    entries = list(ALPHABET)
    out: List[str] = []
    prev = None
    for i in range(0, len(body), width):
        code = int(body[i:i + width], 2)
        if code < len(entries):
            entry = entries[code]
        elif code == len(entries) and prev is not None:
            entry = prev + prev[0]
        else:
            raise InvalidCodeError(f"invalid code {code} (dictionary holds {len(entries)} entries)")
        if prev is not None:
            entries.append(prev + entry[0])
        out.append(entry)
        prev = entry
    return "".join(out)

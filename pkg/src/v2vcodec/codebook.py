"""Safety-message codebook and the two message-level source coders.

The built-in table is normative: codewords are shipped as constants rather
than regenerated from the probabilities, because Huffman tie-breaks are not
recoverable from the message probabilities alone.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Iterator, Optional, Sequence, Tuple, Union

from .bits import BitString, BitsLike
from .errors import (
    CodebookError,
    CodebookParseError,
    DuplicateAbbreviationError,
    DuplicateCodewordError,
    KraftSumError,
    PrefixViolationError,
    ProbabilitySumError,
    UndecodableError,
    UnknownAbbreviationError,
    UnknownMessageError,
)

PROBABILITY_DENOMINATOR = 1075
PRIORITIES = ("P1", "P2", "P3")
ABBREVIATION_BITS = 24

# (id, text, abbreviation, priority, numerator over 1075, codeword)
_TABLE = (
    (1, "left turn ahead", "LTA", "P2", 50, "00111"),
    (2, "right turn ahead", "RTA", "P2", 50, "00110"),
    (3, "emergency ahead", "EGA", "P1", 100, "101"),
    (4, "emergency braking", "EGB", "P1", 100, "100"),
    (5, "brakes applied", "BKA", "P1", 100, "111"),
    (6, "lane change alert", "LCA", "P2", 50, "00001"),
    (7, "queue warning", "QEW", "P3", 25, "001001"),
    (8, "hump warning", "HMW", "P3", 25, "001000"),
    (9, "pedestrian crossing ahead", "PCA", "P1", 100, "110"),
    (10, "work in progress ahead", "WPA", "P3", 25, "001011"),
    (11, "leave way for the ambulance", "LWA", "P1", 100, "011"),
    (12, "intersection ahead", "ISA", "P2", 50, "00000"),
    (13, "taking left turn", "TLT", "P2", 50, "00011"),
    (14, "taking right turn", "TRT", "P2", 50, "00010"),
    (15, "road condition not good", "RNG", "P3", 25, "001010"),
    (16, "allow overtake", "AWO", "P3", 25, "010101"),
    (17, "allowed overtake", "AEO", "P3", 25, "010100"),
    (18, "searching for parking", "SFP", "P3", 25, "01011"),
    (19, "taking u turn", "TUT", "P2", 50, "01001"),
    (20, "vehicle turning in front", "VTF", "P2", 50, "01000"),
)

_TEXT_CHARS = set(string.ascii_lowercase + " ")


@dataclass(frozen=True)
class SafetyMessage:
    id: int
    text: str
    abbreviation: str
    priority: str
    prob_numerator: int
    codeword: BitString

    @property
    def probability(self) -> Fraction:
        return Fraction(self.prob_numerator, PROBABILITY_DENOMINATOR)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "abbreviation": self.abbreviation,
            "priority": self.priority,
            "prob_numerator": self.prob_numerator,
            "codeword_bits": str(self.codeword),
        }


@dataclass(frozen=True)
class Codebook:
    messages: Tuple[SafetyMessage, ...]

    def __post_init__(self):
        validate(self.messages)

    def __iter__(self) -> Iterator[SafetyMessage]:
        return iter(self.messages)

    def __len__(self) -> int:
        return len(self.messages)

    def by_id(self, message_id: int) -> SafetyMessage:
        for m in self.messages:
            if m.id == message_id:
                return m
        raise UnknownMessageError(f"no message with id {message_id}")

    def by_text(self, text: str) -> SafetyMessage:
        for m in self.messages:
            if m.text == text:
                return m
        raise UnknownMessageError(f"message {text!r} is not in the codebook")

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, 2 ** len(m.codeword)) for m in self.messages), Fraction(0))

    def to_json(self) -> list:
        return [m.to_json() for m in self.messages]


def validate(messages: Sequence[SafetyMessage]) -> None:
    """Check every codebook invariant, raising a distinct error per kind."""
    if len(messages) != 20:
        raise CodebookError(f"expected 20 messages, got {len(messages)}")
    ids = [m.id for m in messages]
    if sorted(ids) != list(range(1, 21)):
        raise CodebookError(f"message ids must be 1..20, got {sorted(ids)}")
    for m in messages:
        if not m.text or set(m.text) - _TEXT_CHARS:
            raise CodebookError(f"message {m.id}: text must be lowercase letters and spaces")
        if len(m.abbreviation) != 3 or not m.abbreviation.isascii() or not m.abbreviation.isupper() \
                or not m.abbreviation.isalpha():
            raise CodebookError(f"message {m.id}: abbreviation must be 3 uppercase letters")
        if m.priority not in PRIORITIES:
            raise CodebookError(f"message {m.id}: unknown priority {m.priority!r}")
        if m.prob_numerator <= 0:
            raise CodebookError(f"message {m.id}: probability numerator must be positive")
        if len(m.codeword) not in (3, 5, 6):
            raise CodebookError(f"message {m.id}: codeword length must be 3, 5 or 6")

    seen_cw = {}
    for m in messages:
        key = str(m.codeword)
        if key in seen_cw:
            raise DuplicateCodewordError(f"duplicate codeword {key} (messages {seen_cw[key]} and {m.id})")
        seen_cw[key] = m.id
    seen_ab = {}
    for m in messages:
        if m.abbreviation in seen_ab:
            raise DuplicateAbbreviationError(f"duplicate abbreviation {m.abbreviation}")
        seen_ab[m.abbreviation] = m.id

    total = sum(m.prob_numerator for m in messages)
    if total != PROBABILITY_DENOMINATOR:
        raise ProbabilitySumError(f"probability numerators sum to {total}, expected {PROBABILITY_DENOMINATOR}")

    for a, b in combinations(messages, 2):
        sa, sb = str(a.codeword), str(b.codeword)
        if sa.startswith(sb) or sb.startswith(sa):
            raise PrefixViolationError(f"codewords {sa} and {sb} are not prefix-free")

    kraft = sum((Fraction(1, 2 ** len(m.codeword)) for m in messages), Fraction(0))
    if kraft != 1:
        raise KraftSumError(f"Kraft sum is {kraft}, expected 1")


def _message_from_json(obj: dict) -> SafetyMessage:
    try:
        return SafetyMessage(
            id=int(obj["id"]),
            text=str(obj["text"]),
            abbreviation=str(obj["abbreviation"]),
            priority=str(obj["priority"]),
            prob_numerator=int(obj["prob_numerator"]),
            codeword=BitString(str(obj["codeword_bits"])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CodebookParseError(f"bad codebook entry {obj!r}: {exc}") from exc


def builtin_messages() -> Tuple[SafetyMessage, ...]:
    return tuple(SafetyMessage(i, t, a, p, n, BitString(c)) for i, t, a, p, n, c in _TABLE)


_BUILTIN: Optional[Codebook] = None


def load_codebook(source: Union[None, str, Path] = None) -> Codebook:
    """Return the built-in codebook, or parse and validate a JSON file."""
    global _BUILTIN
    if source is None:
        if _BUILTIN is None:
            _BUILTIN = Codebook(builtin_messages())
        return _BUILTIN
    try:
        raw = json.loads(Path(source).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CodebookParseError(f"cannot read codebook {source}: {exc}") from exc
    if not isinstance(raw, list):
        raise CodebookParseError("codebook file must hold a JSON array")
    return Codebook(tuple(_message_from_json(o) for o in raw))


def probability_encode(cb: Codebook, message_text: str) -> BitString:
    return cb.by_text(message_text).codeword


def probability_decode(cb: Codebook, bits: BitsLike) -> Tuple[str, int]:
    """Match the leading codeword; returns ``(text, bits_consumed)``."""
    s = str(BitString(bits))
    for m in cb:
        cw = str(m.codeword)
        if s.startswith(cw):
            return m.text, len(cw)
    raise UndecodableError(f"no codeword is a prefix of {s!r}")


def abbreviation_encode(cb: Codebook, message_text: str) -> BitString:
    abbr = cb.by_text(message_text).abbreviation
    return BitString.concat(*(BitString.from_int(b, 8) for b in abbr.encode("ascii")))


def abbreviation_decode(cb: Codebook, bits: BitsLike) -> str:
    bits = BitString(bits)
    if len(bits) < ABBREVIATION_BITS:
        raise UndecodableError(f"need {ABBREVIATION_BITS} bits, got {len(bits)}")
    chars = "".join(chr(bits[i:i + 8].to_int()) for i in range(0, ABBREVIATION_BITS, 8))
    for m in cb:
        if m.abbreviation == chars:
            return m.text
    raise UnknownAbbreviationError(chars)

"""Rate-1/2 feed-forward convolutional code with soft-decision Viterbi decoding."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..bits import BitString, BitsLike
from ..errors import BlockLengthError
from . import kernels


@dataclass(frozen=True)
class TrellisSpec:
    """Generator taps; tap ``i`` multiplies the input delayed by ``i`` steps."""

    g1: Tuple[int, ...] = (1, 0, 1, 1)
    g2: Tuple[int, ...] = (1, 1, 1, 1)
    next_state: np.ndarray = field(init=False, repr=False, compare=False)
    outbits: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.g1) != len(self.g2) or len(self.g1) < 2:
            raise ValueError("generators must have equal length >= 2")
        m = self.memory
        ns = np.zeros((self.n_states, 2), dtype=np.int32)
        ob = np.zeros((self.n_states, 2, 2), dtype=np.uint8)
        for s in range(self.n_states):
            past = [(s >> (m - 1 - i)) & 1 for i in range(m)]  # u[t-1] .. u[t-m]
            for u in (0, 1):
                reg = [u] + past
                ob[s, u, 0] = sum(g * r for g, r in zip(self.g1, reg)) & 1
                ob[s, u, 1] = sum(g * r for g, r in zip(self.g2, reg)) & 1
                ns[s, u] = (u << (m - 1)) | (s >> 1)
        ns.flags.writeable = False
        ob.flags.writeable = False
        object.__setattr__(self, "next_state", ns)
        object.__setattr__(self, "outbits", ob)

    @property
    def memory(self) -> int:
        return len(self.g1) - 1

    @property
    def n_states(self) -> int:
        return 1 << self.memory

    @property
    def rate(self) -> float:
        return 0.5


DEFAULT_TRELLIS = TrellisSpec()


def conv_encode(info: BitsLike, t: TrellisSpec = DEFAULT_TRELLIS) -> BitString:
    """Encode with ``memory`` zero flush bits; output pairs ``(y1, y2)`` per step."""
    u = np.concatenate([BitString(info).to_numpy(), np.zeros(t.memory, dtype=np.uint8)]).astype(np.int64)
    y1 = np.convolve(u, t.g1)[: u.size] & 1
    y2 = np.convolve(u, t.g2)[: u.size] & 1
    return BitString(np.column_stack([y1, y2]).ravel())


def viterbi_decode(llrs, t: TrellisSpec = DEFAULT_TRELLIS) -> BitString:
    """Maximum-likelihood info bits for a terminated code word.

    ``llrs`` holds one LLR per coded bit (positive favours 0).  The flush
    bits are stripped from the result.
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.size % 2 or llrs.size < 2 * t.memory:
        raise BlockLengthError(f"need an even number (>= {2 * t.memory}) of LLRs, got {llrs.size}")
    decided = kernels.viterbi(llrs, t.next_state, t.outbits)
    return BitString(decided[: decided.size - t.memory])

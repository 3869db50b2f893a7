"""Gray-mapped 16-QAM and the AWGN channel.

Each axis carries two bits with the Gray map ``00 -> -3, 01 -> -1,
11 -> +1, 10 -> +3``; the symbol for ``b0 b1 b2 b3`` is ``I(b0 b1) +
j Q(b2 b3)``, scaled by ``1/sqrt(10)`` for unit average energy.

Noise is counter based: the two Gaussian samples of symbol ``i`` come from
SplitMix64 outputs ``2i`` and ``2i+1`` of the channel seed through the
Box-Muller transform, so any slice of a block can be regenerated alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bits import BitString
from .rng import stream_array, to_unit_open

BITS_PER_SYMBOL = 4
SCALE = 1.0 / math.sqrt(10.0)
# amplitude by 2-bit pattern value (00, 01, 10, 11)
LEVEL_OF_PATTERN = np.array([-3.0, -1.0, 3.0, 1.0]) * SCALE
LLR_NOISELESS_SIGMA2 = 1e-9


def constellation() -> np.ndarray:
    """All 16 points indexed by the 4-bit value ``b0 b1 b2 b3``."""
    v = np.arange(16)
    return LEVEL_OF_PATTERN[v >> 2] + 1j * LEVEL_OF_PATTERN[v & 3]


@dataclass(frozen=True)
class ChannelParams:
    """AWGN parameters.

    ``ebn0_db`` of ``math.inf`` switches the noise off.  ``Eb`` is the
    energy per transmitted bit (``Es/4``) unless ``rate`` is given, in which
    case ``Eb = Es / (4 * rate)`` (energy per information bit).
    """

    ebn0_db: float
    noise_seed: int = 0
    rate: float = 1.0

    @property
    def n0(self) -> float:
        if math.isinf(self.ebn0_db) and self.ebn0_db > 0:
            return 0.0
        eb = 1.0 / (BITS_PER_SYMBOL * self.rate)
        return eb / 10.0 ** (self.ebn0_db / 10.0)

    @property
    def sigma2(self) -> float:
        """Noise variance per real dimension."""
        return self.n0 / 2.0


def modulate(bits) -> np.ndarray:
    """Map bits to symbols, zero-padding to a multiple of four."""
    b = BitString(bits).to_numpy() if not isinstance(bits, np.ndarray) else bits.astype(np.uint8)
    pad = (-b.size) % BITS_PER_SYMBOL
    if pad:
        b = np.concatenate([b, np.zeros(pad, dtype=np.uint8)])
    q = b.reshape(-1, 4).astype(np.int64)
    i_idx = (q[:, 0] << 1) | q[:, 1]
    q_idx = (q[:, 2] << 1) | q[:, 3]
    return LEVEL_OF_PATTERN[i_idx] + 1j * LEVEL_OF_PATTERN[q_idx]


def gaussian_noise(count: int, seed: int, start: int = 0) -> np.ndarray:
    """Unit-variance complex-pair noise for symbols ``start .. start+count-1``."""
    z = stream_array(seed, 2 * start, 2 * count)
    u1 = to_unit_open(z[0::2])
    u2 = to_unit_open(z[1::2])
    r = np.sqrt(-2.0 * np.log(u1))
    return r * np.cos(2 * np.pi * u2) + 1j * r * np.sin(2 * np.pi * u2)


def apply_awgn(symbols: np.ndarray, params: ChannelParams) -> np.ndarray:
    symbols = np.asarray(symbols, dtype=np.complex128)
    sigma2 = params.sigma2
    if sigma2 == 0.0:
        return symbols.copy()
    return symbols + math.sqrt(sigma2) * gaussian_noise(symbols.size, params.noise_seed)


def _axis_hard(x: np.ndarray) -> np.ndarray:
    """2-bit pattern value per real sample; ties go to the smaller pattern."""
    d = np.abs(x[:, None] - LEVEL_OF_PATTERN[None, :])
    return np.argmin(d, axis=1)


def demodulate_hard(symbols) -> BitString:
    y = np.asarray(symbols, dtype=np.complex128)
    i_pat = _axis_hard(y.real)
    q_pat = _axis_hard(y.imag)
    out = np.column_stack([i_pat >> 1, i_pat & 1, q_pat >> 1, q_pat & 1]).astype(np.uint8)
    return BitString(out.ravel())


def _axis_llr(x: np.ndarray, sigma2: float) -> np.ndarray:
    d2 = (x[:, None] - LEVEL_OF_PATTERN[None, :]) ** 2  # columns: pattern 00, 01, 10, 11
    # first bit: patterns {10, 11} vs {00, 01}; second bit: {01, 11} vs {00, 10}
    b0 = np.minimum(d2[:, 2], d2[:, 3]) - np.minimum(d2[:, 0], d2[:, 1])
    b1 = np.minimum(d2[:, 1], d2[:, 3]) - np.minimum(d2[:, 0], d2[:, 2])
    return np.column_stack([b0, b1]) / (2.0 * sigma2)


def demodulate_llr(symbols, params: ChannelParams) -> np.ndarray:
    """Max-log bit LLRs (positive favours 0), four per symbol.

    The per-axis form is exact for max-log: the other axis contributes the
    same minimum to both hypotheses and cancels.
    """
    y = np.asarray(symbols, dtype=np.complex128)
    sigma2 = params.sigma2 if params.sigma2 > 0 else LLR_NOISELESS_SIGMA2
    li = _axis_llr(y.real, sigma2)
    lq = _axis_llr(y.imag, sigma2)
    return np.column_stack([li, lq]).ravel()

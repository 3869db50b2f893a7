"""Source -> ECC -> channel code -> 16-QAM -> AWGN -> back, with seeded Monte Carlo.

Padding added for block or symbol alignment never counts toward a BER: each
stage's output is truncated to the length its encoder was fed before
comparing.  Those lengths live in the simulator, not in the transmitted bits.

Every trial draws its noise from ``trial_seed(master, message, pipeline,
trial)``, a SplitMix64 fold, so results do not depend on how trials are
scheduled across processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import codebook as cbm
from .bits import BitString
from .channel.convolutional import DEFAULT_TRELLIS, conv_encode, viterbi_decode
from .channel.ldpc import DEFAULT_LDPC_SEED, default_ldpc_code, ldpc_decode, ldpc_encode
from .channel.turbo import DEFAULT_INTERLEAVER_SEED, interleaver, turbo_decode, turbo_encode
from .ecc import ECC_CODES, ecc_decode_stream, ecc_encode_stream
from .errors import CodecError
from .modem import ChannelParams, apply_awgn, demodulate_hard, demodulate_llr, modulate
from .rng import mix
from .source_coding import (
    FrequencyTable,
    arithmetic_decode,
    arithmetic_encode,
    build_huffman,
    default_frequency_table,
    huffman_decode,
    huffman_encode,
    lzw_decode,
    lzw_encode,
)

SOURCES = ("huffman", "arithmetic", "lzw", "abbreviation", "probability")
ECCS = ("hamming", "tornado", "negation")
CHANNELS = ("convolutional", "turbo", "ldpc")
DEFAULT_MESSAGES = (3, 1, 15)


@dataclass(frozen=True, order=True)
class PipelineSpec:
    source: str
    ecc: str
    channel: str

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown source coder {self.source!r}")
        if self.ecc not in ECCS:
            raise ValueError(f"unknown error-control code {self.ecc!r}")
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel code {self.channel!r}")

    @property
    def index(self) -> int:
        """Position in the canonical 45-way enumeration."""
        return (SOURCES.index(self.source) * len(ECCS) + ECCS.index(self.ecc)) * len(CHANNELS) \
            + CHANNELS.index(self.channel)

    def __str__(self) -> str:
        return f"{self.source}+{self.ecc}+{self.channel}"


def all_pipelines() -> List[PipelineSpec]:
    return [PipelineSpec(s, e, c) for s, e, c in product(SOURCES, ECCS, CHANNELS)]


@dataclass(frozen=True)
class SimConfig:
    ebn0_db: float = 2.0
    trials: int = 1000
    master_seed: int = 42
    message_ids: Tuple[int, ...] = DEFAULT_MESSAGES
    turbo_iterations: int = 6
    ldpc_iterations: int = 50
    noise: bool = True
    per_info_bit: bool = False
    # raise the per-record trial count until this many bits are transmitted
    min_transmitted_bits: int = 0
    workers: int = 1
    interleaver_seed: int = DEFAULT_INTERLEAVER_SEED
    ldpc_seed: int = DEFAULT_LDPC_SEED
    freq: Optional[FrequencyTable] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.turbo_iterations < 1 or self.ldpc_iterations < 1:
            raise ValueError("iteration caps must be >= 1")
        object.__setattr__(self, "message_ids", tuple(int(m) for m in self.message_ids))

    def trials_for(self, bits_transmitted: int) -> int:
        if self.min_transmitted_bits <= 0:
            return self.trials
        return max(self.trials, -(-self.min_transmitted_bits // bits_transmitted))


@dataclass
class TrialResult:
    source_bits: np.ndarray
    ecc_bits: np.ndarray
    tx_bits: np.ndarray
    rx_hard_bits: np.ndarray
    channel_decoded: np.ndarray
    ecc_decoded: np.ndarray
    channel_errors: int
    ecc_errors: int
    decoded_text: Optional[str]
    success: bool
    ecc_status: Dict[str, int] = field(default_factory=dict)
    source_error: Optional[str] = None

    def trace(self) -> Dict[str, str]:
        def s(a):
            return str(BitString(a))

        return {
            "source": s(self.source_bits),
            "after_ecc": s(self.ecc_bits),
            "transmitted": s(self.tx_bits),
            "received_hard": s(self.rx_hard_bits),
            "channel_decoded": s(self.channel_decoded),
            "ecc_decoded": s(self.ecc_decoded),
        }


@dataclass(frozen=True)
class MetricsRecord:
    message_id: int
    message_text: str
    source: str
    ecc: str
    channel: str
    ebn0_db: float
    trials: int
    bits_source: int
    bits_after_ecc: int
    bits_transmitted: int
    compression_ratio: float
    ber_channel: float
    ber_ecc: float
    msg_success_rate: float
    master_seed: int
    channel_bit_errors: int = 0
    ecc_bit_errors: int = 0

    @property
    def pipeline(self) -> PipelineSpec:
        return PipelineSpec(self.source, self.ecc, self.channel)

    def to_dict(self) -> dict:
        return asdict(self)


class StageError(CodecError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage} stage failed: {cause}")
        self.stage = stage
        self.cause = cause


def trial_seed(master_seed: int, message_id: int, pipeline_index: int, trial_index: int) -> int:
    return mix(master_seed, message_id, pipeline_index, trial_index)


# ---------------------------------------------------------------------------
# link context


class Link:
    """Code objects and lookup tables shared by every trial of one config."""

    def __init__(self, config: SimConfig, cb: Optional[cbm.Codebook] = None):
        self.config = config
        self.codebook = cb or cbm.load_codebook()
        self.freq = config.freq or default_frequency_table()
        self.huffman = build_huffman(self.freq)
        self.trellis = DEFAULT_TRELLIS
        self.ldpc = default_ldpc_code(config.ldpc_seed)

    # source coding -------------------------------------------------------

    def source_encode(self, name: str, text: str) -> BitString:
        if name == "huffman":
            return huffman_encode(text, self.huffman)
        if name == "arithmetic":
            return arithmetic_encode(text, self.freq)
        if name == "lzw":
            return lzw_encode(text)
        if name == "abbreviation":
            return cbm.abbreviation_encode(self.codebook, text)
        return cbm.probability_encode(self.codebook, text)

    def source_decode(self, name: str, bits: np.ndarray) -> str:
        if name == "huffman":
            return huffman_decode(bits, self.huffman)
        if name == "arithmetic":
            return arithmetic_decode(bits, self.freq)
        if name == "lzw":
            return lzw_decode(bits)
        if name == "abbreviation":
            return cbm.abbreviation_decode(self.codebook, bits)
        return cbm.probability_decode(self.codebook, bits)[0]

    # channel coding ------------------------------------------------------

    def channel_encode(self, name: str, bits: np.ndarray) -> np.ndarray:
        if name == "convolutional":
            return conv_encode(bits, self.trellis).to_numpy()
        if name == "turbo":
            il = interleaver(bits.size, self.config.interleaver_seed)
            return turbo_encode(bits, self.trellis, il).to_numpy()
        k = self.ldpc.k
        padded = np.concatenate([bits, np.zeros((-bits.size) % k, dtype=np.uint8)])
        return np.concatenate([ldpc_encode(b, self.ldpc).to_numpy() for b in padded.reshape(-1, k)])

    def channel_decode(self, name: str, llr: np.ndarray, length: int) -> np.ndarray:
        if name == "convolutional":
            return viterbi_decode(llr, self.trellis).to_numpy()
        if name == "turbo":
            il = interleaver(length, self.config.interleaver_seed)
            return turbo_decode(llr, self.trellis, il, self.config.turbo_iterations).to_numpy()
        n = self.ldpc.n
        blocks = [ldpc_decode(b, self.ldpc, self.config.ldpc_iterations).msg.to_numpy()
                  for b in llr.reshape(-1, n)]
        return np.concatenate(blocks)[:length]


@lru_cache(maxsize=8)
def _link_for(config: SimConfig) -> Link:
    return Link(config)


@dataclass(frozen=True)
class _Prepared:
    text: str
    source_bits: np.ndarray
    ecc_bits: np.ndarray
    tx_bits: np.ndarray
    symbols: np.ndarray


def _prepare(link: Link, text: str, pipeline: PipelineSpec) -> _Prepared:
    try:
        src = link.source_encode(pipeline.source, text).to_numpy()
    except CodecError as exc:
        raise StageError("source encode", exc) from exc
    try:
        ecc = ecc_encode_stream(pipeline.ecc, src)
    except CodecError as exc:
        raise StageError("ecc encode", exc) from exc
    try:
        tx = link.channel_encode(pipeline.channel, ecc)
    except CodecError as exc:
        raise StageError("channel encode", exc) from exc
    return _Prepared(text, src, ecc, tx, modulate(tx))


def _receive(link: Link, prep: _Prepared, pipeline: PipelineSpec, seed: int) -> TrialResult:
    cfg = link.config
    rate = prep.source_bits.size / prep.tx_bits.size if cfg.per_info_bit else 1.0
    params = ChannelParams(cfg.ebn0_db if cfg.noise else math.inf, seed, rate)
    rx = apply_awgn(prep.symbols, params)
    llr = demodulate_llr(rx, params)[: prep.tx_bits.size]
    rx_hard = demodulate_hard(rx).to_numpy()[: prep.tx_bits.size]

    try:
        chan_out = link.channel_decode(pipeline.channel, llr, prep.ecc_bits.size)
        ecc_out, status = ecc_decode_stream(pipeline.ecc, chan_out)
    except CodecError as exc:
        raise StageError("channel/ecc decode", exc) from exc
    ecc_out = ecc_out[: prep.source_bits.size]

    text: Optional[str] = None
    err: Optional[str] = None
    try:
        text = link.source_decode(pipeline.source, ecc_out)
    except CodecError as exc:  # residual errors can make the stream undecodable
        err = str(exc)
    return TrialResult(
        source_bits=prep.source_bits,
        ecc_bits=prep.ecc_bits,
        tx_bits=prep.tx_bits,
        rx_hard_bits=rx_hard,
        channel_decoded=chan_out,
        ecc_decoded=ecc_out,
        channel_errors=int(np.count_nonzero(chan_out != prep.ecc_bits)),
        ecc_errors=int(np.count_nonzero(ecc_out != prep.source_bits)),
        decoded_text=text,
        success=text == prep.text,
        ecc_status=status,
        source_error=err,
    )


def _resolve_message(link: Link, message) -> cbm.SafetyMessage:
    if isinstance(message, cbm.SafetyMessage):
        return message
    if isinstance(message, int):
        return link.codebook.by_id(message)
    return link.codebook.by_text(message)


def run_trial(message, pipeline: PipelineSpec, config: SimConfig, seed: int) -> TrialResult:
    """One end-to-end pass; ``message`` may be a SafetyMessage, id or text."""
    link = _link_for(config)
    msg = _resolve_message(link, message)
    return _receive(link, _prepare(link, msg.text, pipeline), pipeline, seed)


def compression_ratio(message, source_coder: str, config: Optional[SimConfig] = None) -> float:
    """8 bits per character over the source-coded length."""
    link = _link_for(config or SimConfig())
    msg = _resolve_message(link, message)
    bits = len(link.source_encode(source_coder, msg.text))
    return 8 * len(msg.text) / bits


def run_monte_carlo(message, pipeline: PipelineSpec, config: SimConfig) -> MetricsRecord:
    link = _link_for(config)
    msg = _resolve_message(link, message)
    prep = _prepare(link, msg.text, pipeline)
    trials = config.trials_for(prep.tx_bits.size)
    chan_err = ecc_err = ok = 0
    for t in range(trials):
        res = _receive(link, prep, pipeline, trial_seed(config.master_seed, msg.id, pipeline.index, t))
        chan_err += res.channel_errors
        ecc_err += res.ecc_errors
        ok += res.success
    return MetricsRecord(
        message_id=msg.id,
        message_text=msg.text,
        source=pipeline.source,
        ecc=pipeline.ecc,
        channel=pipeline.channel,
        ebn0_db=config.ebn0_db if config.noise else math.inf,
        trials=trials,
        bits_source=int(prep.source_bits.size),
        bits_after_ecc=int(prep.ecc_bits.size),
        bits_transmitted=int(prep.tx_bits.size),
        compression_ratio=8 * len(msg.text) / prep.source_bits.size,
        ber_channel=chan_err / (trials * prep.ecc_bits.size),
        ber_ecc=ecc_err / (trials * prep.source_bits.size),
        msg_success_rate=ok / trials,
        master_seed=config.master_seed,
        channel_bit_errors=chan_err,
        ecc_bit_errors=ecc_err,
    )


def _task(args) -> MetricsRecord:
    message_id, pipeline, config = args
    return run_monte_carlo(message_id, pipeline, config)


def sweep(config: SimConfig, pipelines: Optional[Sequence[PipelineSpec]] = None) -> List[MetricsRecord]:
    """One record per selected message and pipeline, ordered by id then pipeline."""
    pipelines = sorted(pipelines or all_pipelines(), key=lambda p: p.index)
    tasks = [(mid, p, config) for mid in sorted(set(config.message_ids)) for p in pipelines]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_task, tasks, chunksize=1))
    return [_task(t) for t in tasks]


def expected_bit_counts(bits_source: int, ecc: str, channel: str, ldpc_k: int = 12, ldpc_n: int = 24,
                        memory: int = 3) -> Tuple[int, int]:
    """Closed-form ``(bits_after_ecc, bits_transmitted)`` for a pipeline."""
    code = ECC_CODES[ecc]
    after = -(-bits_source // code.k) * code.n
    if channel == "convolutional":
        tx = 2 * (after + memory)
    elif channel == "turbo":
        tx = 3 * after + 2 * memory
    else:
        tx = -(-after // ldpc_k) * ldpc_n
    return after, tx

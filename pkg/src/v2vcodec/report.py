"""CSV/JSON emission of sweep records and technique rankings."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Dict, Iterable, List, Sequence, TextIO, Tuple, Union

from .simulator import CHANNELS, ECCS, SOURCES, MetricsRecord

CSV_COLUMNS = (
    "message_id", "message_text", "source", "ecc", "channel", "ebn0_db", "trials",
    "bits_source", "bits_after_ecc", "bits_transmitted", "compression_ratio",
    "ber_channel", "ber_ecc", "msg_success_rate", "master_seed",
)
REFERENCE_SELECTION = ("probability", "tornado", "turbo")
Z95 = 1.959963984540054


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(records: Iterable[MetricsRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def records_to_json(records: Iterable[MetricsRecord]) -> str:
    rows = []
    for r in records:
        d = r.to_dict()
        if math.isinf(d["ebn0_db"]):
            d["ebn0_db"] = "inf"
        rows.append(d)
    return json.dumps(rows, indent=1) + "\n"


def write_records(records: Sequence[MetricsRecord], path: Union[str, Path], fmt: str = "csv") -> None:
    text = records_to_csv(records) if fmt == "csv" else records_to_json(records)
    Path(path).write_text(text)


def read_csv(src: Union[str, Path, TextIO]) -> List[MetricsRecord]:
    """Parse a sweep CSV; bit-error counts are rebuilt from BER x bits x trials."""
    if isinstance(src, (str, Path)):
        with open(src, newline="") as fh:
            return read_csv(fh)
    reader = csv.DictReader(src)
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for row in reader:
        trials = int(row["trials"])
        bits_source = int(row["bits_source"])
        bits_after_ecc = int(row["bits_after_ecc"])
        ber_c = float(row["ber_channel"])
        ber_e = float(row["ber_ecc"])
        out.append(MetricsRecord(
            message_id=int(row["message_id"]),
            message_text=row["message_text"],
            source=row["source"],
            ecc=row["ecc"],
            channel=row["channel"],
            ebn0_db=float(row["ebn0_db"]),
            trials=trials,
            bits_source=bits_source,
            bits_after_ecc=bits_after_ecc,
            bits_transmitted=int(row["bits_transmitted"]),
            compression_ratio=float(row["compression_ratio"]),
            ber_channel=ber_c,
            ber_ecc=ber_e,
            msg_success_rate=float(row["msg_success_rate"]),
            master_seed=int(row["master_seed"]),
            channel_bit_errors=round(ber_c * bits_after_ecc * trials),
            ecc_bit_errors=round(ber_e * bits_source * trials),
        ))
    return out


# ---------------------------------------------------------------------------
# rankings


@dataclass
class Comparison:
    """Claim: ``better`` has mean BER <= ``worse`` at one stage."""

    stage: str
    better: str
    worse: str
    better_ber: float
    worse_ber: float
    better_ci: Tuple[float, float]
    worse_ci: Tuple[float, float]

    @property
    def holds(self) -> bool:
        return self.better_ber <= self.worse_ber

    @property
    def significant(self) -> bool:
        return self.holds and self.better_ci[1] < self.worse_ci[0]

    @property
    def verdict(self) -> str:
        if self.significant:
            return "confirmed"
        return "FLAG: holds but 95% CIs overlap" if self.holds else "FLAG: reversed"

    def line(self) -> str:
        return (f"{self.stage}: {self.better} {self.better_ber:.3e} "
                f"[{self.better_ci[0]:.3e}, {self.better_ci[1]:.3e}] <= {self.worse} "
                f"{self.worse_ber:.3e} [{self.worse_ci[0]:.3e}, {self.worse_ci[1]:.3e}] -> {self.verdict}")


@dataclass
class RankingReport:
    # metric -> ordered technique names (best first), averaged over messages
    overall: Dict[str, List[str]]
    # metric -> message id -> ordered technique names
    per_message: Dict[str, Dict[int, List[str]]]
    # metric -> technique -> mean value
    means: Dict[str, Dict[str, float]]
    selected: Tuple[str, str, str]
    comparisons: List[Comparison] = field(default_factory=list)

    @property
    def matches_reference(self) -> bool:
        return tuple(self.selected) == REFERENCE_SELECTION

    @property
    def flags(self) -> List[str]:
        return [c.line() for c in self.comparisons if not c.significant]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_message"] = {m: {str(k): v for k, v in pm.items()} for m, pm in self.per_message.items()}
        d["matches_reference"] = self.matches_reference
        d["comparisons"] = [dict(asdict(c), verdict=c.verdict) for c in self.comparisons]
        return d

    def lines(self) -> List[str]:
        out = []
        for metric, order in self.overall.items():
            vals = ", ".join(f"{t}={self.means[metric][t]:.4g}" for t in order)
            out.append(f"{metric}: {' > '.join(order)} ({vals})")
            for mid, per in sorted(self.per_message[metric].items()):
                out.append(f"  message {mid}: {' > '.join(per)}")
        for c in self.comparisons:
            out.append(c.line())
        yes = "yes" if self.matches_reference else "no"
        out.append(f"selected: {' + '.join(self.selected)} (matches Table II: {yes})")
        return out


_METRICS = (
    ("compression_ratio", "source", SOURCES, True),
    ("ber_ecc", "ecc", ECCS, False),
    ("ber_channel", "channel", CHANNELS, False),
)


def _rank(values: Dict[str, float], order: Sequence[str], descending: bool) -> List[str]:
    names = [t for t in order if t in values]
    return sorted(names, key=lambda t: -values[t] if descending else values[t])


def _mean_with_ci(records: Sequence[MetricsRecord], attr: str, value: str, stage: str,
                  z: float = Z95) -> Tuple[float, Tuple[float, float]]:
    """Mean per-record BER and a normal-approximation interval for it.

    Each record contributes a binomial variance computed from the
    Agresti-Coull adjusted proportion, so zero-error records still carry
    uncertainty.
    """
    bers, var = [], 0.0
    for r in records:
        if getattr(r, attr) != value:
            continue
        if stage == "ber_ecc":
            errors, n = r.ecc_bit_errors, r.bits_source * r.trials
        else:
            errors, n = r.channel_bit_errors, r.bits_after_ecc * r.trials
        bers.append(getattr(r, stage))
        p_adj = (errors + 2) / (n + 4)
        var += p_adj * (1 - p_adj) / (n + 4)
    if not bers:
        return 0.0, (0.0, 1.0)
    mean = fmean(bers)
    half = z * math.sqrt(var) / len(bers)
    return mean, (max(0.0, mean - half), min(1.0, mean + half))


def _compare(records, attr, stage, better, worse) -> Comparison:
    mb, cb = _mean_with_ci(records, attr, better, stage)
    mw, cw = _mean_with_ci(records, attr, worse, stage)
    return Comparison(stage, better, worse, mb, mw, cb, cw)


def emit_report(records: Sequence[MetricsRecord]) -> RankingReport:
    """Rank techniques per metric and check the expected qualitative orderings.

    The claim checks compare mean per-record BERs with 95% intervals; bit
    errors within one trial are correlated, so the intervals are optimistic.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to report on")
    overall: Dict[str, List[str]] = {}
    per_message: Dict[str, Dict[int, List[str]]] = {}
    means: Dict[str, Dict[str, float]] = {}
    for metric, attr, order, desc in _METRICS:
        buckets: Dict[str, List[float]] = {}
        by_msg: Dict[int, Dict[str, List[float]]] = {}
        for r in records:
            buckets.setdefault(getattr(r, attr), []).append(getattr(r, metric))
            by_msg.setdefault(r.message_id, {}).setdefault(getattr(r, attr), []).append(getattr(r, metric))
        means[metric] = {t: fmean(v) for t, v in buckets.items()}
        overall[metric] = _rank(means[metric], order, desc)
        per_message[metric] = {
            mid: _rank({t: fmean(v) for t, v in d.items()}, order, desc) for mid, d in by_msg.items()
        }
    selected = (overall["compression_ratio"][0], overall["ber_ecc"][0], overall["ber_channel"][0])
    comparisons = []
    present_ecc = {r.ecc for r in records}
    present_ch = {r.channel for r in records}
    for other in ("hamming", "negation"):
        if {"tornado", other} <= present_ecc:
            comparisons.append(_compare(records, "ecc", "ber_ecc", "tornado", other))
    if {"turbo", "convolutional"} <= present_ch:
        comparisons.append(_compare(records, "channel", "ber_channel", "turbo", "convolutional"))
    return RankingReport(overall, per_message, means, selected, comparisons)

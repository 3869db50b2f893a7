"""Command-line entry point: ``v2vcodec {sweep,trial,codebook,report}``.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 runtime failure.
``V2VCODEC_OUTPUT_DIR`` sets the directory for outputs when ``--out`` is omitted.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .codebook import load_codebook
from .errors import CodebookError
from .report import emit_report, read_csv, write_records
from .simulator import CHANNELS, ECCS, SOURCES, PipelineSpec, SimConfig, run_trial, sweep, trial_seed
from .source_coding import load_frequency_table

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2, 3
OUTPUT_DIR_ENV = "V2VCODEC_OUTPUT_DIR"

log = logging.getLogger("v2vcodec")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _message_list(text: str) -> tuple:
    if text == "all":
        return tuple(range(1, 21))
    try:
        ids = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad message list {text!r}")
    if not ids or any(not 1 <= i <= 20 for i in ids):
        raise argparse.ArgumentTypeError("message ids must be in 1..20")
    return ids


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ebn0-db", type=float, default=2.0, help="Eb/N0 in dB (default 2)")
    p.add_argument("--seed", type=int, default=42, help="master seed")
    p.add_argument("--no-noise", action="store_true", help="bypass the AWGN channel")
    p.add_argument("--turbo-iters", type=int, default=6)
    p.add_argument("--ldpc-iters", type=int, default=50)
    p.add_argument("--per-info-bit", action="store_true",
                   help="normalise Eb per source bit instead of per transmitted bit")
    p.add_argument("--freq-table", type=Path, help="symbol,probability file for Huffman/arithmetic")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="v2vcodec", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="run all 45 pipelines for the selected messages")
    _add_sim_flags(p)
    p.add_argument("--trials", type=int, default=1000, help="trials per (message, pipeline)")
    p.add_argument("--min-bits", type=int, default=0,
                   help="raise trials until each record transmits at least this many bits")
    p.add_argument("--messages", type=_message_list, default=(3, 1, 15), help="ids, e.g. 3,1,15, or 'all'")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("trial", help="run one trial and optionally trace every stage")
    _add_sim_flags(p)
    p.add_argument("--message", type=int, required=True)
    p.add_argument("--source", choices=SOURCES, required=True)
    p.add_argument("--ecc", choices=ECCS, required=True)
    p.add_argument("--channel", choices=CHANNELS, required=True)
    p.add_argument("--trial-index", type=int, default=0)
    p.add_argument("--trace", action="store_true")

    p = sub.add_parser("codebook", help="validate or dump the message codebook")
    p.add_argument("--validate", action="store_true")
    p.add_argument("--file", type=Path, help="JSON codebook (default: built-in)")
    p.add_argument("--dump", action="store_true", help="print the codebook as JSON")

    p = sub.add_parser("report", help="rank techniques from a sweep CSV")
    p.add_argument("--in", dest="infile", type=Path, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", type=Path)
    return parser


def _config(args, **extra) -> SimConfig:
    freq = load_frequency_table(args.freq_table) if args.freq_table else None
    return SimConfig(
        ebn0_db=args.ebn0_db,
        master_seed=args.seed,
        noise=not args.no_noise,
        turbo_iterations=args.turbo_iters,
        ldpc_iterations=args.ldpc_iters,
        per_info_bit=args.per_info_bit,
        freq=freq,
        **extra,
    )


def _cmd_sweep(args) -> int:
    cfg = _config(args, trials=args.trials, message_ids=args.messages, workers=args.workers,
                  min_transmitted_bits=args.min_bits)
    out = args.out or Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"sweep.{args.format}"
    log.info("sweeping %d messages x 45 pipelines -> %s", len(set(cfg.message_ids)), out)
    records = sweep(cfg)
    write_records(records, out, args.format)
    print(f"wrote {len(records)} records to {out}")
    return EXIT_OK


def _cmd_trial(args) -> int:
    cfg = _config(args)
    pipe = PipelineSpec(args.source, args.ecc, args.channel)
    seed = trial_seed(cfg.master_seed, args.message, pipe.index, args.trial_index)
    res = run_trial(args.message, pipe, cfg, seed)
    ber_c = res.channel_errors / res.ecc_bits.size
    ber_e = res.ecc_errors / res.source_bits.size
    print(f"pipeline: {pipe}")
    print(f"ebn0_db: {cfg.ebn0_db if cfg.noise else math.inf}")
    if args.trace:
        for stage, bits in res.trace().items():
            print(f"{stage} ({len(bits)} bits): {bits}")
        print(f"ecc_status: {json.dumps(res.ecc_status, sort_keys=True)}")
    print(f"decoded: {res.decoded_text!r}")
    print(f"ber_channel: {ber_c}")
    print(f"ber_ecc: {ber_e}")
    print(f"success: {str(res.success).lower()}")
    return EXIT_OK


def _cmd_codebook(args) -> int:
    cb = load_codebook(args.file)
    if args.dump:
        print(json.dumps(cb.to_json(), indent=1))
    if args.validate or not args.dump:
        print(f"kraft={float(cb.kraft_sum())}, prefix-free, {len(cb)} messages")
    return EXIT_OK


def _cmd_report(args) -> int:
    report = emit_report(read_csv(args.infile))
    text = json.dumps(report.to_dict(), indent=1) if args.format == "json" else "\n".join(report.lines())
    if args.out:
        args.out.write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"v2vcodec: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handler = {"sweep": _cmd_sweep, "trial": _cmd_trial, "codebook": _cmd_codebook, "report": _cmd_report}
    try:
        return handler[args.command](args)
    except CodebookError as exc:
        print(f"v2vcodec: validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, OSError) as exc:
        print(f"v2vcodec: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run_cli(argv))


if __name__ == "__main__":
    main()

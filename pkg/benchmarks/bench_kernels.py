"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from v2vcodec.channel import DEFAULT_TRELLIS, default_ldpc_code
from v2vcodec.channel import kernels
from v2vcodec.channel.turbo import rsc_trellis


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(backend, rng):
    t = DEFAULT_TRELLIS
    ns, par = rsc_trellis()
    code = default_ldpc_code()
    conv_llr = [rng.normal(1.0, 1.5, 2 * 131) for _ in range(50)]
    turbo = [rng.normal(1.0, 1.5, (3, 131)) for _ in range(50)]
    ldpc = [rng.normal(1.0, 1.2, 24) for _ in range(200)]
    return {
        "viterbi (50 x 128 bits)":
            lambda: [backend.viterbi(x, t.next_state, t.outbits) for x in conv_llr],
        "max-log-MAP (50 x 131 steps)":
            lambda: [backend.max_log_map(s, p, a, ns, par, True) for s, p, a in turbo],
        "sum-product (200 x (24,12))":
            lambda: [backend.sum_product(x, code.row_ptr, code.col_idx, 50) for x in ldpc],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = ["python"] + (["compiled"] if kernels.HAVE_COMPILED else [])
    results = {}
    for name in names:
        jobs = workloads(kernels.get_backend(name), np.random.default_rng(0))
        results[name] = {k: _time(fn, args.repeat) for k, fn in jobs.items()}
    print(f"{'kernel':32s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for k, py in results["python"].items():
        cc = results.get("compiled", {}).get(k)
        if cc is None:
            print(f"{k:32s} {py * 1e3:8.1f}ms {'n/a':>10s} {'n/a':>8s}")
        else:
            print(f"{k:32s} {py * 1e3:8.1f}ms {cc * 1e3:8.1f}ms {py / cc:7.1f}x")


if __name__ == "__main__":
    main()

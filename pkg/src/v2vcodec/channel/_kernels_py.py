"""Reference (numpy) implementations of the trellis and graph kernels.

These are the fallback used when the compiled ``_kernels`` extension is
unavailable, and the cross-check the compiled versions are tested against.
LLR convention throughout: positive means bit 0 is more likely.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

NEG_INF = -1e300
LLR_CLIP = 30.0


def viterbi(llr: np.ndarray, next_state: np.ndarray, outbits: np.ndarray) -> np.ndarray:
    """Soft-decision Viterbi over a trellis starting and ending in state 0.

    ``next_state[s, u]`` and ``outbits[s, u, j]`` describe the trellis; the
    branch cost is the sum of the LLRs at positions where the branch emits a
    1, which orders paths exactly like correlation / Hamming distance.
    Returns one decision per trellis step (flush steps included).
    """
    llr = np.ascontiguousarray(llr, dtype=np.float64)
    n_states, _, n_out = outbits.shape
    steps = llr.size // n_out
    llr = llr.reshape(steps, n_out)

    # predecessor lists: for every target state, the (source, input) pairs
    src = np.empty((n_states, 2), dtype=np.int64)
    inp = np.empty((n_states, 2), dtype=np.int64)
    fill = np.zeros(n_states, dtype=np.int64)
    for s in range(n_states):
        for u in range(2):
            t = next_state[s, u]
            src[t, fill[t]] = s
            inp[t, fill[t]] = u
            fill[t] += 1
    branch_bits = outbits[src, inp].astype(np.float64)  # (S, 2, n_out)

    inf = np.inf
    metric = np.full(n_states, inf)
    metric[0] = 0.0
    choice = np.empty((steps, n_states), dtype=np.int8)
    for t in range(steps):
        cand = metric[src] + branch_bits @ llr[t]
        # ties resolve to the first predecessor
        pick = (cand[:, 1] < cand[:, 0]).astype(np.int8)
        choice[t] = pick
        metric = np.where(pick, cand[:, 1], cand[:, 0])

    out = np.empty(steps, dtype=np.uint8)
    state = 0
    for t in range(steps - 1, -1, -1):
        k = choice[t, state]
        out[t] = inp[state, k]
        state = src[state, k]
    return out


def max_log_map(sys_llr: np.ndarray, par_llr: np.ndarray, apriori: np.ndarray,
                next_state: np.ndarray, parity: np.ndarray, terminated: bool) -> np.ndarray:
    """Max-log BCJR for a rate-1/2 systematic trellis; returns posterior LLRs."""
    sys_llr = np.asarray(sys_llr, dtype=np.float64)
    par_llr = np.asarray(par_llr, dtype=np.float64)
    apriori = np.asarray(apriori, dtype=np.float64)
    n_states = next_state.shape[0]
    steps = sys_llr.size
    sgn_u = np.array([1.0, -1.0])
    sgn_p = 1.0 - 2.0 * parity.astype(np.float64)  # (S, 2)
    states = np.arange(n_states)

    # gamma[t, s, u]
    gamma = 0.5 * ((sys_llr + apriori)[:, None, None] * sgn_u[None, None, :]
                   + par_llr[:, None, None] * sgn_p[None, :, :])

    alpha = np.full((steps + 1, n_states), NEG_INF)
    alpha[0, 0] = 0.0
    for t in range(steps):
        nxt = np.full(n_states, NEG_INF)
        for u in range(2):
            np.maximum.at(nxt, next_state[:, u], alpha[t] + gamma[t, :, u])
        alpha[t + 1] = nxt - nxt.max()

    beta = np.full((steps + 1, n_states), NEG_INF)
    if terminated:
        beta[steps, 0] = 0.0
    else:
        beta[steps] = 0.0
    for t in range(steps - 1, -1, -1):
        b = np.maximum(gamma[t, :, 0] + beta[t + 1, next_state[:, 0]],
                       gamma[t, :, 1] + beta[t + 1, next_state[:, 1]])
        beta[t] = b - b.max()

    out = np.empty(steps)
    for t in range(steps):
        m0 = (alpha[t] + gamma[t, :, 0] + beta[t + 1, next_state[states, 0]]).max()
        m1 = (alpha[t] + gamma[t, :, 1] + beta[t + 1, next_state[states, 1]]).max()
        out[t] = m0 - m1
    return out


def sum_product(llr: np.ndarray, row_ptr: np.ndarray, col_idx: np.ndarray,
                max_iters: int) -> Tuple[np.ndarray, bool, int]:
    """Flooding sum-product decoder on the Tanner graph given in CSR form.

    Returns ``(hard_bits, converged, iterations_run)``; the syndrome of the
    channel decision is checked before the first iteration.
    """
    llr = np.clip(np.asarray(llr, dtype=np.float64), -LLR_CLIP, LLR_CLIP)
    n = llr.size
    n_checks = row_ptr.size - 1
    edge_row = np.repeat(np.arange(n_checks), np.diff(row_ptr))

    def syndrome_ok(hard):
        return not np.bitwise_xor.reduceat(hard[col_idx], row_ptr[:-1]).any()

    hard = (llr < 0).astype(np.uint8)
    if syndrome_ok(hard):
        return hard, True, 0

    v2c = llr[col_idx].copy()
    for it in range(1, max_iters + 1):
        t = np.tanh(np.clip(v2c, -LLR_CLIP, LLR_CLIP) / 2.0)
        # leave-one-out product via the full product divided out; zero-safe
        t = np.where(np.abs(t) < 1e-300, 1e-300, t)
        prod = np.multiply.reduceat(t, row_ptr[:-1])[edge_row]
        ratio = np.clip(prod / t, -1 + 1e-15, 1 - 1e-15)
        c2v = 2.0 * np.arctanh(ratio)
        post = llr + np.bincount(col_idx, weights=c2v, minlength=n)
        v2c = post[col_idx] - c2v
        hard = (post < 0).astype(np.uint8)
        if syndrome_ok(hard):
            return hard, True, it
    return hard, False, max_iters

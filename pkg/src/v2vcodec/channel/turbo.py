"""Parallel-concatenated turbo code built from two recursive systematic encoders.

Both constituents reuse the convolutional taps: ``g2`` is the feedback
polynomial and ``g1`` the feed-forward one.  Only encoder 1 is terminated.

Output layout for ``L`` info bits::

    x0 p1_0 p2_0  x1 p1_1 p2_1 ... x_{L-1} p1_{L-1} p2_{L-1}  t0 q0 t1 q1 t2 q2

where ``t``/``q`` are encoder 1's tail input and parity bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Tuple

import numpy as np

from ..bits import BitString, BitsLike
from ..errors import BlockLengthError
from ..rng import mix, stream
from . import kernels
from .convolutional import DEFAULT_TRELLIS, TrellisSpec

DEFAULT_INTERLEAVER_SEED = 0x5EED7


@dataclass(frozen=True)
class InterleaverSpec:
    """Fisher-Yates permutation keyed by ``mix(seed, length)``.

    The interleaved sequence is ``x[permutation]``.
    """

    length: int
    seed: int = DEFAULT_INTERLEAVER_SEED
    permutation: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("interleaver length must be >= 1")
        perm = list(range(self.length))
        key = mix(self.seed, self.length)
        for n, i in enumerate(range(self.length - 1, 0, -1)):
            j = stream(key, n) % (i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        arr = np.array(perm, dtype=np.int64)
        arr.flags.writeable = False
        object.__setattr__(self, "permutation", arr)

    @property
    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.permutation)
        inv[self.permutation] = np.arange(self.length)
        return inv


@lru_cache(maxsize=4096)
def interleaver(length: int, seed: int = DEFAULT_INTERLEAVER_SEED) -> InterleaverSpec:
    return InterleaverSpec(length, seed)


@lru_cache(maxsize=None)
def rsc_trellis(t: TrellisSpec = DEFAULT_TRELLIS) -> Tuple[np.ndarray, np.ndarray]:
    """``(next_state, parity)`` tables for the recursive systematic form."""
    m = t.memory
    fb, ff = t.g2, t.g1
    ns = np.zeros((t.n_states, 2), dtype=np.int32)
    par = np.zeros((t.n_states, 2), dtype=np.uint8)
    for s in range(t.n_states):
        past = [(s >> (m - 1 - i)) & 1 for i in range(m)]  # a[t-1] .. a[t-m]
        for u in (0, 1):
            a = (u + sum(f * p for f, p in zip(fb[1:], past))) & 1
            reg = [a] + past
            par[s, u] = sum(g * r for g, r in zip(ff, reg)) & 1
            ns[s, u] = (a << (m - 1)) | (s >> 1)
    ns.flags.writeable = False
    par.flags.writeable = False
    return ns, par


def _rsc_run(u: np.ndarray, t: TrellisSpec, terminate: bool):
    ns, par = rsc_trellis(t)
    m = t.memory
    fb = t.g2
    state = 0
    parity = np.empty(u.size, dtype=np.uint8)
    for i, bit in enumerate(u):
        parity[i] = par[state, bit]
        state = ns[state, bit]
    tail_u = np.empty(m if terminate else 0, dtype=np.uint8)
    tail_p = np.empty_like(tail_u)
    if terminate:
        for i in range(m):
            past = [(state >> (m - 1 - k)) & 1 for k in range(m)]
            # input that drives the feedback sum to zero
            bit = sum(f * p for f, p in zip(fb[1:], past)) & 1
            tail_u[i] = bit
            tail_p[i] = par[state, bit]
            state = ns[state, bit]
        assert state == 0
    return parity, tail_u, tail_p


def turbo_encode(info: BitsLike, t: TrellisSpec = DEFAULT_TRELLIS,
                 il: InterleaverSpec = None) -> BitString:
    u = BitString(info).to_numpy()
    il = il or interleaver(u.size)
    if u.size != il.length:
        raise BlockLengthError(f"info length {u.size} != interleaver length {il.length}")
    p1, tail_u, tail_p = _rsc_run(u, t, terminate=True)
    p2, _, _ = _rsc_run(u[il.permutation], t, terminate=False)
    body = np.column_stack([u, p1, p2]).ravel()
    tail = np.column_stack([tail_u, tail_p]).ravel()
    return BitString(np.concatenate([body, tail]))


def turbo_decode_llr(llrs, t: TrellisSpec = DEFAULT_TRELLIS, il: InterleaverSpec = None,
                     iterations: int = 6, extrinsic_scale: float = 1.0) -> np.ndarray:
    """Iterative max-log-MAP decoding; returns posterior LLRs of the info bits."""
    llrs = np.asarray(llrs, dtype=np.float64)
    m = t.memory
    L, rem = divmod(llrs.size - 2 * m, 3)
    if rem or L < 1:
        raise BlockLengthError(f"{llrs.size} LLRs is not 3L+{2 * m} for any L >= 1")
    il = il or interleaver(L)
    if il.length != L:
        raise BlockLengthError(f"LLRs imply L={L}, interleaver has {il.length}")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    ns, par = rsc_trellis(t)
    body = llrs[: 3 * L].reshape(L, 3)
    tail = llrs[3 * L:].reshape(m, 2)
    ls, lp1, lp2 = body[:, 0], body[:, 1], body[:, 2]
    perm = il.permutation
    sys1 = np.concatenate([ls, tail[:, 0]])
    par1 = np.concatenate([lp1, tail[:, 1]])
    sys2 = ls[perm]
    zeros_tail = np.zeros(m)

    la1 = np.zeros(L)
    post = ls
    for _ in range(iterations):
        post1 = kernels.max_log_map(sys1, par1, np.concatenate([la1, zeros_tail]), ns, par, True)[:L]
        le1 = extrinsic_scale * (post1 - ls - la1)
        la2 = le1[perm]
        post2 = kernels.max_log_map(sys2, lp2, la2, ns, par, False)
        le2 = extrinsic_scale * (post2 - sys2 - la2)
        la1 = np.empty(L)
        la1[perm] = le2
        post = np.empty(L)
        post[perm] = post2
    return post


def turbo_decode(llrs, t: TrellisSpec = DEFAULT_TRELLIS, il: InterleaverSpec = None,
                 iterations: int = 6) -> BitString:
    return BitString((turbo_decode_llr(llrs, t, il, iterations) < 0).astype(np.uint8))

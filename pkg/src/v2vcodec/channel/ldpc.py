"""Regular (24,12) LDPC code: seeded construction, systematic encoding, sum-product decoding.

With ``H = [X : Y]`` and ``X`` invertible over GF(2), the parity bits are
``X^-1 Y msg`` and a code word is ``[parity : msg]``.  The generator is
``G = [(X^-1 Y)^T : I]`` so that ``G H^T = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from ..bits import BitString, BitsLike
from ..errors import BlockLengthError, ConstructionError
from . import kernels

DEFAULT_LDPC_SEED = 2024


def gf2_rank(m: np.ndarray) -> int:
    a = (np.asarray(m) & 1).astype(np.uint8)
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        piv = np.flatnonzero(a[r:, c])
        if piv.size == 0:
            continue
        p = r + piv[0]
        a[[r, p]] = a[[p, r]]
        hit = np.flatnonzero(a[:, c])
        hit = hit[hit != r]
        a[hit] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


def gf2_inv(m: np.ndarray) -> Optional[np.ndarray]:
    """Inverse over GF(2), or ``None`` when singular."""
    n = m.shape[0]
    a = np.concatenate([(np.asarray(m) & 1).astype(np.uint8), np.eye(n, dtype=np.uint8)], axis=1)
    for c in range(n):
        piv = np.flatnonzero(a[c:, c])
        if piv.size == 0:
            return None
        p = c + piv[0]
        a[[c, p]] = a[[p, c]]
        hit = np.flatnonzero(a[:, c])
        hit = hit[hit != c]
        a[hit] ^= a[c]
    return a[:, n:]


@dataclass(frozen=True)
class LdpcCode:
    H: np.ndarray
    seed: int
    G: np.ndarray = field(init=False, repr=False)
    parity_map: np.ndarray = field(init=False, repr=False)  # X^-1 Y
    row_ptr: np.ndarray = field(init=False, repr=False)
    col_idx: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        H = (np.asarray(self.H) & 1).astype(np.uint8)
        m, n = H.shape
        x_inv = gf2_inv(H[:, :m])
        if x_inv is None:
            raise ConstructionError("left square block of H is singular")
        P = (x_inv.astype(np.int64) @ H[:, m:]) & 1
        G = np.concatenate([P.T, np.eye(n - m, dtype=np.int64)], axis=1).astype(np.uint8)
        rows, cols = np.nonzero(H)
        row_ptr = np.concatenate([[0], np.cumsum(np.bincount(rows, minlength=m))]).astype(np.int32)
        for name, arr in (("H", H), ("G", G), ("parity_map", P.astype(np.uint8)),
                          ("row_ptr", row_ptr), ("col_idx", cols.astype(np.int32))):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.H.shape[1]

    @property
    def k(self) -> int:
        return self.H.shape[1] - self.H.shape[0]

    def syndrome(self, word) -> np.ndarray:
        return (self.H.astype(np.int64) @ np.asarray(word, dtype=np.int64)) & 1


def _socket_matrix(n: int, m: int, wc: int, wr: int, rng: np.random.Generator) -> Optional[np.ndarray]:
    sockets = rng.permutation(np.repeat(np.arange(n), wc))
    H = np.zeros((m, n), dtype=np.uint8)
    for r in range(m):
        cols = sockets[r * wr:(r + 1) * wr]
        if np.unique(cols).size != wr:
            return None  # parallel edge
        H[r, cols] = 1
    return H


def four_cycle_count(H: np.ndarray) -> int:
    """Number of column pairs sharing two or more checks."""
    overlap = H.astype(np.int64).T @ H.astype(np.int64)
    return int(np.triu(overlap > 1, 1).sum())


def ldpc_generate(n: int = 24, k: int = 12, wc: int = 3, wr: int = 6,
                  seed: int = DEFAULT_LDPC_SEED, candidates: int = 64,
                  max_tries: int = 20000) -> LdpcCode:
    """Seeded regular construction by random edge-socket matching.

    Draws with parallel edges or rank deficiency are rejected.  Among the
    first ``candidates`` valid draws the one with the fewest length-4 cycles
    is kept (a 3-by-6 regular 12x24 matrix cannot be free of them).  Its
    columns are then shuffled until the left square block is invertible.
    """
    m = n - k
    if n * wc != m * wr:
        raise ValueError(f"n*wc ({n * wc}) must equal (n-k)*wr ({m * wr})")
    rng = np.random.default_rng(seed)
    best = None
    found = 0
    for _ in range(max_tries):
        H = _socket_matrix(n, m, wc, wr, rng)
        if H is None or gf2_rank(H) != m:
            continue
        found += 1
        score = four_cycle_count(H)
        if best is None or score < best[0]:
            best = (score, H)
        if found >= candidates:
            break
    if best is None:
        raise ConstructionError(f"no full-rank regular H after {max_tries} draws; choose another seed")
    H = best[1]
    for _ in range(1000):
        Hp = H[:, rng.permutation(n)]
        if gf2_inv(Hp[:, :m]) is not None:
            return LdpcCode(Hp, seed)
    raise ConstructionError("could not find an invertible left block; choose another seed")


@lru_cache(maxsize=8)
def default_ldpc_code(seed: int = DEFAULT_LDPC_SEED) -> LdpcCode:
    return ldpc_generate(seed=seed)


def ldpc_encode(msg: BitsLike, code: Optional[LdpcCode] = None) -> BitString:
    code = code or default_ldpc_code()
    u = BitString(msg).to_numpy()
    if u.size != code.k:
        raise BlockLengthError(f"expected {code.k} message bits, got {u.size}")
    parity = (code.parity_map.astype(np.int64) @ u.astype(np.int64)) & 1
    return BitString(np.concatenate([parity.astype(np.uint8), u]))


class LdpcResult(NamedTuple):
    msg: BitString
    converged: bool
    iterations: int


def ldpc_decode(llrs, code: Optional[LdpcCode] = None, max_iters: int = 50) -> LdpcResult:
    code = code or default_ldpc_code()
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.size != code.n:
        raise BlockLengthError(f"expected {code.n} LLRs, got {llrs.size}")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    hard, converged, iters = kernels.sum_product(llrs, code.row_ptr, code.col_idx, max_iters)
    return LdpcResult(BitString(hard[code.n - code.k:]), bool(converged), int(iters))

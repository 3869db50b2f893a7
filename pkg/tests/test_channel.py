import os
import subprocess
import sys
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from v2vcodec.bits import BitString
from v2vcodec.channel import (
    DEFAULT_TRELLIS,
    conv_encode,
    default_ldpc_code,
    interleaver,
    ldpc_decode,
    ldpc_encode,
    ldpc_generate,
    turbo_decode,
    turbo_decode_llr,
    turbo_encode,
    viterbi_decode,
)
from v2vcodec.channel import kernels
from v2vcodec.channel.ldpc import four_cycle_count, gf2_rank
from v2vcodec.channel.turbo import rsc_trellis
from v2vcodec.errors import BlockLengthError
from v2vcodec.modem import ChannelParams, apply_awgn, demodulate_llr, modulate

from .conftest import backends

A = 4.0


def _llr(bits):
    return A * (1.0 - 2.0 * np.asarray(BitString(bits).to_numpy(), dtype=float))


bit_lists = st.lists(st.integers(0, 1), min_size=1, max_size=40)


# --- convolutional ---------------------------------------------------------

def _conv_oracle(u):
    u = list(u) + [0, 0, 0]
    get = lambda t: u[t] if t >= 0 else 0
    out = []
    for t in range(len(u)):
        out.append(get(t) ^ get(t - 2) ^ get(t - 3))
        out.append(get(t) ^ get(t - 1) ^ get(t - 2) ^ get(t - 3))
    return "".join(map(str, out))


def test_conv_impulse():
    assert conv_encode([1, 0, 0, 0]) == "11" "01" "11" "11" "00" "00" "00"


@given(bit_lists)
def test_conv_matches_shift_register(u):
    assert conv_encode(u) == _conv_oracle(u)


@pytest.mark.parametrize("L", [0, 1, 9])
def test_conv_zero_input(L):
    assert conv_encode([0] * L) == "0" * (2 * (L + 3))


@given(st.integers(1, 30).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n))))
def test_conv_linear(pair):
    a, b = map(BitString, pair)
    assert conv_encode(a ^ b) == conv_encode(a) ^ conv_encode(b)


@given(bit_lists)
@settings(deadline=None)
def test_viterbi_clean_roundtrip(u):
    assert viterbi_decode(_llr(conv_encode(u))) == BitString(u)


def test_viterbi_erasure_and_bad_length():
    out = viterbi_decode(np.zeros(2 * (5 + 3)))
    assert len(out) == 5
    with pytest.raises(BlockLengthError):
        viterbi_decode(np.zeros(7))
    with pytest.raises(BlockLengthError):
        viterbi_decode(np.zeros(4))


def _ml_oracle_cases(info_words):
    codebook = np.array([conv_encode(BitString.from_int(v, 8)).to_numpy() for v in range(256)])
    n = codebook.shape[1]
    patterns = [()] + [(i,) for i in range(n)] + list(combinations(range(n), 2))
    for v in info_words:
        for pat in patterns:
            r = codebook[v].copy()
            r[list(pat)] ^= 1
            d = (codebook != r).sum(axis=1)
            best = np.flatnonzero(d == d.min())
            yield r, set(best.tolist())


def _check_viterbi(backend, info_words):
    checked = ties = 0
    t = DEFAULT_TRELLIS
    for r, best in _ml_oracle_cases(info_words):
        llr = A * (1.0 - 2.0 * r)
        dec = backend.viterbi(llr, t.next_state, t.outbits)
        v = BitString(dec[:8]).to_int()
        assert v in best
        assert not dec[8:].any()
        checked += 1
        ties += len(best) > 1
    return checked, ties


def test_viterbi_equals_ml_oracle_active_backend():
    checked, ties = _check_viterbi(kernels, range(0, 256, 5))
    assert checked == 52 * 254


@pytest.mark.parametrize("name", backends())
def test_viterbi_equals_ml_oracle_each_backend(name):
    _check_viterbi(kernels.get_backend(name), [0, 1, 0x5A, 0xFF])


# --- turbo -----------------------------------------------------------------

def _rsc_oracle(u, terminate):
    # feedback 1+D+D^2+D^3, feedforward 1+D^2+D^3
    a1 = a2 = a3 = 0
    par, tail = [], []
    for bit in u:
        a = bit ^ a1 ^ a2 ^ a3
        par.append(a ^ a2 ^ a3)
        a1, a2, a3 = a, a1, a2
    if terminate:
        for _ in range(3):
            bit = a1 ^ a2 ^ a3
            a = 0
            tail.append((bit, a ^ a2 ^ a3))
            a1, a2, a3 = a, a1, a2
    return par, tail


@given(st.lists(st.integers(0, 1), min_size=1, max_size=60))
def test_turbo_encoder_layout(u):
    il = interleaver(len(u))
    out = turbo_encode(u, il=il).to_numpy()
    L = len(u)
    assert out.size == 3 * L + 6
    p1, tail = _rsc_oracle(u, True)
    p2, _ = _rsc_oracle([u[i] for i in il.permutation], False)
    assert list(out[0:3 * L:3]) == u
    assert list(out[1:3 * L:3]) == p1
    assert list(out[2:3 * L:3]) == p2
    assert [tuple(x) for x in out[3 * L:].reshape(3, 2)] == tail


def test_turbo_small_examples():
    assert len(turbo_encode([1, 0, 0, 0])) == 18
    assert turbo_encode([0] * 7) == "0" * 27


def test_interleaver_is_deterministic_permutation():
    il = interleaver(50)
    assert sorted(il.permutation) == list(range(50))
    assert np.array_equal(il.permutation, interleaver(50).permutation)
    assert not np.array_equal(il.permutation, interleaver(50, seed=1).permutation)
    x = np.arange(50)
    assert np.array_equal(x[il.permutation][il.inverse], x)


@given(st.integers(1, 40).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n))))
def test_turbo_linear(pair):
    a, b = map(BitString, pair)
    assert turbo_encode(a ^ b) == turbo_encode(a) ^ turbo_encode(b)


@given(bit_lists)
@settings(deadline=None, max_examples=40)
def test_turbo_clean_decode(u):
    llr = _llr(turbo_encode(u))
    assert turbo_decode(llr, iterations=1) == BitString(u)
    assert turbo_decode(llr, iterations=6) == BitString(u)


def test_turbo_clean_decisions_stable_and_grow(rng):
    u = rng.integers(0, 2, 64)
    llr = _llr(turbo_encode(u))
    p1 = turbo_decode_llr(llr, iterations=1)
    p6 = turbo_decode_llr(llr, iterations=6)
    assert np.array_equal(p1 < 0, p6 < 0)
    assert np.all(np.abs(p6) >= np.abs(p1) - 1e-9)


def test_turbo_bad_length():
    with pytest.raises(BlockLengthError):
        turbo_decode(np.zeros(10))
    with pytest.raises(BlockLengthError):
        turbo_encode([1, 0], il=interleaver(3))


@pytest.mark.slow
def test_turbo_iterations_help_at_2db():
    # Eb per information bit so the comparison is not trivially error-free
    L, blocks = 128, 790
    errs = {1: 0, 6: 0}
    for b in range(blocks):
        bits = np.random.default_rng(b).integers(0, 2, L).astype(np.uint8)
        tx = turbo_encode(bits).to_numpy()
        params = ChannelParams(2.0, noise_seed=1000 + b, rate=L / tx.size)
        llr = demodulate_llr(apply_awgn(modulate(tx), params), params)[: tx.size]
        for it in errs:
            errs[it] += int((turbo_decode(llr, iterations=it).to_numpy() != bits).sum())
    assert L * blocks >= 10 ** 5
    assert errs[1] > 0
    assert errs[6] <= errs[1]


# --- LDPC ------------------------------------------------------------------

@pytest.fixture(scope="module")
def code():
    return default_ldpc_code()


def test_ldpc_structure(code):
    H = code.H.astype(int)
    assert H.shape == (12, 24)
    assert (H.sum(axis=0) == 3).all() and (H.sum(axis=1) == 6).all()
    assert gf2_rank(H[:, :12]) == 12
    assert not ((code.G.astype(int) @ H.T) % 2).any()
    assert code.G.shape == (12, 24)


def test_ldpc_deterministic():
    a, b = ldpc_generate(seed=7), ldpc_generate(seed=7)
    assert np.array_equal(a.H, b.H)
    assert not np.array_equal(a.H, ldpc_generate(seed=8).H)
    assert four_cycle_count(default_ldpc_code().H) == four_cycle_count(ldpc_generate(seed=2024).H)


def test_ldpc_encode_properties(code, rng):
    assert ldpc_encode([0] * 12, code) == "0" * 24
    for _ in range(200):
        m = rng.integers(0, 2, 12)
        c = ldpc_encode(m, code).to_numpy()
        assert not code.syndrome(c).any()
        assert np.array_equal(c[12:], m)
    with pytest.raises(BlockLengthError):
        ldpc_encode([1] * 11, code)


def test_ldpc_clean_decode(code, rng):
    m = rng.integers(0, 2, 12)
    res = ldpc_decode(_llr(ldpc_encode(m, code)), code)
    assert res.msg == BitString(m) and res.converged and res.iterations == 0


def test_ldpc_single_flip(code):
    rng = np.random.default_rng(99)
    ok = total = 0
    for _ in range(500):
        m = rng.integers(0, 2, 12)
        llr = _llr(ldpc_encode(m, code))
        llr[rng.integers(0, 24)] *= -1
        res = ldpc_decode(llr, code, 50)
        ok += res.msg == BitString(m)
        total += 1
    assert ok / total >= 0.99


def test_ldpc_converged_output_is_codeword(code):
    rng = np.random.default_rng(3)
    for _ in range(300):
        m = rng.integers(0, 2, 12)
        llr = _llr(ldpc_encode(m, code)) + rng.normal(0, 3.0, 24)
        hard, converged, _ = kernels.sum_product(llr, code.row_ptr, code.col_idx, 50)
        if converged:
            assert not code.syndrome(hard).any()


def test_ldpc_zero_llrs(code):
    res = ldpc_decode(np.zeros(24), code)
    assert len(res.msg) == 12
    assert res.converged == (not code.syndrome(np.zeros(24)).any())
    with pytest.raises(BlockLengthError):
        ldpc_decode(np.zeros(23), code)


# --- backends --------------------------------------------------------------

@pytest.mark.skipif(not kernels.HAVE_COMPILED, reason="compiled kernels not built")
def test_backends_agree(code, rng):
    py, cc = kernels.get_backend("python"), kernels.get_backend("compiled")
    t = DEFAULT_TRELLIS
    for _ in range(30):
        llr = rng.normal(0, 2, 2 * 40)
        assert np.array_equal(py.viterbi(llr, t.next_state, t.outbits), cc.viterbi(llr, t.next_state, t.outbits))
    ns, par = rsc_trellis()
    for term in (True, False):
        s, p, a = rng.normal(0, 2, (3, 35))
        np.testing.assert_allclose(py.max_log_map(s, p, a, ns, par, term),
                                   cc.max_log_map(s, p, a, ns, par, term), atol=1e-9)
    for _ in range(30):
        llr = rng.normal(1.5, 2, 24)
        hp, cp, ip = py.sum_product(llr, code.row_ptr, code.col_idx, 50)
        hc, c2, ic = cc.sum_product(llr, code.row_ptr, code.col_idx, 50)
        assert np.array_equal(hp, hc) and cp == c2 and ip == ic


def test_forced_python_backend():
    env = dict(os.environ, V2VCODEC_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from v2vcodec.channel import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_get_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")

from itertools import combinations

import numpy as np
import pytest

from v2vcodec.bits import BitString
from v2vcodec.ecc import (
    ECC_CODES,
    Status,
    TornadoGraph,
    default_tornado_graph,
    ecc_decode_stream,
    ecc_encode_stream,
    hamming_decode,
    hamming_encode,
    negation_decode,
    negation_encode,
    tornado_decode,
    tornado_encode,
)
from v2vcodec.errors import BlockLengthError


def _flip(word, *positions):
    s = list(str(word))
    for p in positions:
        s[p] = "1" if s[p] == "0" else "0"
    return "".join(s)


def _words(k):
    return [BitString.from_int(v, k) for v in range(1 << k)]


# --- Hamming(7,4) --------------------------------------------------------

def _hamming_oracle(d):
    # positions 1..7, data at 3,5,6,7, even parity over each check group
    w = [0] * 8
    w[3], w[5], w[6], w[7] = d
    w[1] = (w[3] + w[5] + w[7]) % 2
    w[2] = (w[3] + w[6] + w[7]) % 2
    w[4] = (w[5] + w[6] + w[7]) % 2
    return "".join(map(str, w[1:]))


def test_hamming_examples():
    assert hamming_encode("0000") == "0000000"
    assert hamming_encode("1011") == "0110011"
    assert hamming_decode("0000000") == (BitString("0000"), Status.CLEAN, None)
    res = hamming_decode("0110111")
    assert res.data == "1011" and res.status == Status.CORRECTED and res.detail == 5


def test_hamming_matches_oracle_and_corrects_every_single_error():
    for d in _words(4):
        cw = hamming_encode(d)
        assert cw == _hamming_oracle(list(d))
        for p in range(7):
            res = hamming_decode(_flip(cw, p))
            assert res.data == d and res.status == Status.CORRECTED and res.detail == p + 1


def test_hamming_double_errors_miscorrect():
    cw = hamming_encode("1011")
    res = hamming_decode(_flip(cw, 0, 1))
    assert res.status == Status.CORRECTED and res.data != "1011"


def test_hamming_block_length():
    with pytest.raises(BlockLengthError):
        hamming_encode("101")


# --- Tornado(12,7) -------------------------------------------------------

def _tornado_oracle(d):
    d1, d2, d3, d4, d5, d6, d7 = d
    c1 = d1 ^ d2 ^ d3
    c2 = d3 ^ d4 ^ d5
    c3 = d5 ^ d6 ^ d7
    c4 = d1 ^ d4 ^ d7
    c5 = c1 ^ c2 ^ c3 ^ c4
    return "".join(map(str, d + [c1, c2, c3, c4, c5]))


def test_tornado_examples():
    assert tornado_encode("0000000") == "000000000000"
    assert tornado_encode("1000000") == "1000000" + "10010"
    assert tornado_decode("100000010010").status == Status.CLEAN


def test_tornado_encoder_matches_equations():
    for d in _words(7):
        assert tornado_encode(d) == _tornado_oracle(list(d))


def test_tornado_columns_distinct_nonzero():
    H = default_tornado_graph().H
    cols = {tuple(H[:, j]) for j in range(12)}
    assert len(cols) == 12 and (0,) * 5 not in cols


def test_tornado_corrects_every_single_error():
    for d in _words(7):
        cw = tornado_encode(d)
        for p in range(12):
            res = tornado_decode(_flip(cw, p))
            assert res.data == d and res.status == Status.CORRECTED and res.detail == 1


def _double_error_census():
    g = default_tornado_graph()
    counts = {"corrected": 0, "miscorrected": 0, "flagged": 0}
    for d in _words(7):
        cw = tornado_encode(d)
        for pair in combinations(range(12), 2):
            res = tornado_decode(_flip(cw, *pair), g)
            if res.status == Status.DETECTED:
                counts["flagged"] += 1
                assert res.data == BitString(_flip(cw, *pair))[:7]
            elif res.data == d:
                counts["corrected"] += 1
            else:
                counts["miscorrected"] += 1
    return counts


def test_tornado_double_errors():
    # weight-2 syndromes: unique leaders are stored, ambiguous ones flagged,
    # and those equal to a weight-1 column miscorrect
    g = default_tornado_graph()
    H = g.H.astype(int)
    col = [int("".join(map(str, H[:, j])), 2) for j in range(12)]
    singles = set(col)
    by_syn = {}
    for a, b in combinations(range(12), 2):
        by_syn.setdefault(col[a] ^ col[b], []).append((a, b))
    unique = [s for s, v in by_syn.items() if len(v) == 1 and s not in singles]
    collide = sum(len(v) for s, v in by_syn.items() if s in singles)
    ambiguous = sum(len(v) for s, v in by_syn.items() if len(v) > 1 and s not in singles)
    assert len(unique) + collide + ambiguous == 66
    assert len(unique) >= 1
    # every stored weight-2 leader is one of the unique syndromes
    stored2 = {s for s, p in g.syndrome_table.items() if len(p) == 2}
    assert stored2 == set(unique)
    counts = _double_error_census()
    assert counts == {"corrected": 128 * len(unique), "miscorrected": 128 * collide,
                      "flagged": 128 * ambiguous}


def test_tornado_unknown_syndromes_flagged():
    g = default_tornado_graph()
    zero = np.zeros(12, dtype=np.uint8)
    flagged = 0
    for s in range(1, 32):
        if s in g.syndrome_table:
            continue
        # find a word with this syndrome
        for v in range(1 << 12):
            w = np.array(list(map(int, format(v, "012b"))), dtype=np.uint8)
            if g.syndrome(w) == s:
                break
        res = tornado_decode(w, g)
        assert res.status == Status.DETECTED
        assert res.data == BitString(w[:7])
        flagged += 1
    assert g.syndrome(zero) == 0
    assert flagged == 31 - len(g.syndrome_table)


def test_tornado_custom_graph_validation():
    with pytest.raises(ValueError):
        TornadoGraph(checks=((0, 1), (0, 1), (2, 3), (4, 5)))


# --- data negation -------------------------------------------------------

@pytest.mark.parametrize("d, out", [("00000000", "0000000000000000"),
                                    ("10110101", "1011010101001010"),
                                    ("11000000", "1100000011000000")])
def test_negation_examples(d, out):
    assert negation_encode(d) == out


def test_negation_clean_and_single_errors():
    for d in _words(8):
        cw = negation_encode(d)
        assert negation_decode(cw) == (d, Status.CLEAN, None)
        for p in range(16):
            res = negation_decode(_flip(cw, p))
            assert res.data == d and res.status == Status.CORRECTED, (str(d), p)
            assert res.detail == p + 1


def test_negation_tie_flagged():
    cw = negation_encode("00000000")
    res = negation_decode(_flip(cw, 8, 9, 10, 11))
    assert res.status == Status.DETECTED


# --- stream helpers ------------------------------------------------------

@pytest.mark.parametrize("name", sorted(ECC_CODES))
def test_stream_roundtrip(name, rng):
    code = ECC_CODES[name]
    bits = rng.integers(0, 2, 37).astype(np.uint8)
    enc = ecc_encode_stream(name, bits)
    nblocks = -(-37 // code.k)
    assert enc.size == nblocks * code.n
    dec, counts = ecc_decode_stream(name, enc)
    assert np.array_equal(dec[:37], bits)
    assert counts["clean"] == nblocks


@pytest.mark.parametrize("name", sorted(ECC_CODES))
def test_stream_matches_block_functions(name, rng):
    code = ECC_CODES[name]
    words = rng.integers(0, 2, (50, code.n)).astype(np.uint8)
    dec, counts = ecc_decode_stream(name, words.ravel())
    statuses = {}
    for i, w in enumerate(words):
        res = code.decode(BitString(w))
        assert np.array_equal(dec[i * code.k:(i + 1) * code.k], res.data.to_numpy())
        statuses[res.status.value] = statuses.get(res.status.value, 0) + 1
    assert {k: v for k, v in counts.items() if v} == statuses


def test_stream_bad_length():
    with pytest.raises(BlockLengthError):
        ecc_decode_stream("hamming", np.zeros(8, dtype=np.uint8))

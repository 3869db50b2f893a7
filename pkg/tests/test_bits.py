from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from v2vcodec.bits import BitString, hamming_distance, pad_to_multiple


@pytest.mark.parametrize("a, b, d", [("1010", "1010", 0), ("1010", "0011", 2), ("0000000", "1111111", 7)])
def test_hamming_distance_examples(a, b, d):
    assert hamming_distance(BitString(a), BitString(b)) == d


def test_hamming_distance_length_mismatch():
    with pytest.raises(ValueError):
        hamming_distance("101", "10")


@pytest.mark.parametrize("x, block, out", [("101", 4, "1010"), ("1011", 4, "1011"), ("11", 7, "1100000")])
def test_pad_examples(x, block, out):
    assert pad_to_multiple(BitString(x), block, 0) == out


def test_pad_fill_one_and_empty():
    assert pad_to_multiple("1", 3, 1) == "111"
    assert len(pad_to_multiple("", 5)) == 0


def _all_words(n):
    return ["".join(p) for p in product("01", repeat=n)]


@pytest.mark.parametrize("n", range(0, 6))
def test_distance_is_a_metric_exhaustive(n):
    words = _all_words(n)
    for a in words:
        assert hamming_distance(a, a) == 0
        for b in words:
            d = hamming_distance(a, b)
            assert d == hamming_distance(b, a)
            assert (d == 0) == (a == b)
    # triangle inequality on a sample of triples
    rng = np.random.default_rng(n)
    for _ in range(200):
        a, b, c = (words[i] for i in rng.integers(0, len(words), 3))
        assert hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c)


@given(st.lists(st.integers(0, 1), max_size=64), st.integers(1, 16), st.integers(0, 1))
def test_pad_properties(bits, block, fill):
    x = BitString(bits)
    y = pad_to_multiple(x, block, fill)
    assert len(y) % block == 0
    assert len(y) - len(x) < block
    assert y[: len(x)] == x
    assert all(b == fill for b in y[len(x):])


@given(st.lists(st.integers(0, 1), max_size=64))
def test_bitstring_roundtrips(bits):
    x = BitString(bits)
    assert BitString(str(x)) == x
    assert BitString(x.to_numpy()) == x
    assert list(x) == bits
    assert (x ^ x).weight() == 0
    assert (~x).weight() == len(x) - x.weight()
    if bits:
        assert BitString.from_int(x.to_int(), len(x)) == x


def test_bitstring_basics():
    x = BitString("1011")
    assert x.to_int() == 11
    assert x + "01" == "101101"
    assert BitString.concat("1", [0, 1], np.array([1], dtype=np.uint8)) == "1011"
    assert isinstance(x[1:3], BitString) and x[1:3] == "01"
    assert x[0] == 1
    assert hash(x) == hash(BitString("1011"))
    with pytest.raises(ValueError):
        BitString("10a")
    with pytest.raises(ValueError):
        x.to_numpy()[0] = 0

import math

import numpy as np
import pytest

from v2vcodec.bits import BitString
from v2vcodec.modem import (
    ChannelParams,
    apply_awgn,
    constellation,
    demodulate_hard,
    demodulate_llr,
    gaussian_noise,
    modulate,
)

GRAY = {"00": -3, "01": -1, "11": 1, "10": 3}


def _oracle_point(b):
    return complex(GRAY[b[0:2]], GRAY[b[2:4]]) / math.sqrt(10)


def test_modulate_examples():
    assert modulate(BitString("0000"))[0] == pytest.approx((-3 - 3j) / math.sqrt(10))
    assert modulate(BitString("")).size == 0
    assert modulate(BitString("1")).size == 1


def test_constellation_matches_gray_map():
    pts = constellation()
    for v in range(16):
        b = format(v, "04b")
        assert pts[v] == pytest.approx(_oracle_point(b))
        assert modulate(BitString(b))[0] == pytest.approx(_oracle_point(b))
    assert np.mean(np.abs(pts) ** 2) == pytest.approx(1.0)


def test_gray_neighbours_differ_in_one_bit():
    pts = constellation()
    d_min = 2 / math.sqrt(10)
    for a in range(16):
        for b in range(a + 1, 16):
            if abs(abs(pts[a] - pts[b]) - d_min) < 1e-12:
                assert bin(a ^ b).count("1") == 1


def test_hard_demod_roundtrip_and_ties():
    bits = BitString(np.random.default_rng(0).integers(0, 2, 400))
    assert demodulate_hard(modulate(bits)) == bits
    # halfway between -3 and -1 (patterns 00 and 01) -> 00; between -1 and +1 -> 01
    s = 1 / math.sqrt(10)
    assert demodulate_hard([complex(-2 * s, 0 * s)]) == "0001"
    assert demodulate_hard([complex(2 * s, 2 * s)]) == "1010"


def test_llr_sign_agrees_with_hard_decision():
    grid = np.linspace(-1.5, 1.5, 61)
    y = (grid[:, None] + 1j * grid[None, :]).ravel()
    # nudge off the decision boundaries
    y = y + 1e-7 * (1 + 1j)
    llr = demodulate_llr(y, ChannelParams(5.0))
    hard = demodulate_hard(y).to_numpy()
    assert np.array_equal((llr < 0).astype(np.uint8), hard)


def test_llr_magnitude_and_symmetry():
    bits = BitString(np.random.default_rng(1).integers(0, 2, 400))
    llr = demodulate_llr(modulate(bits), ChannelParams(40.0))
    assert np.all(np.abs(llr) > 50)
    assert np.array_equal((llr < 0).astype(np.uint8), bits.to_numpy())
    zero = demodulate_llr([0j], ChannelParams(2.0))
    assert zero[0] == 0 and zero[2] == 0


def test_llr_noise_free_sentinel():
    llr = demodulate_llr(modulate(BitString("0110")), ChannelParams(math.inf))
    assert np.all(np.isfinite(llr)) and np.all(np.abs(llr) > 50)


def test_noise_off_is_identity():
    s = modulate(BitString("01101100"))
    assert np.array_equal(apply_awgn(s, ChannelParams(math.inf, 5)), s)


def test_noise_deterministic_and_sliceable():
    a = gaussian_noise(1000, seed=77)
    assert np.array_equal(a, gaussian_noise(1000, seed=77))
    assert not np.array_equal(a, gaussian_noise(1000, seed=78))
    assert np.array_equal(a[400:500], gaussian_noise(100, seed=77, start=400))


def test_noise_statistics():
    n = gaussian_noise(200_000, seed=3)
    assert np.var(n.real) == pytest.approx(1.0, rel=0.01)
    assert np.var(n.imag) == pytest.approx(1.0, rel=0.01)
    assert abs(np.mean(n.real)) < 0.01
    assert abs(np.corrcoef(n.real, n.imag)[0, 1]) < 0.01


def test_sigma_follows_ebn0():
    p = ChannelParams(10.0)
    # unit symbol energy, four bits per symbol
    assert p.n0 == pytest.approx(0.25 / 10.0)
    assert p.sigma2 == pytest.approx(0.0125)
    assert ChannelParams(10.0, rate=0.5).n0 == pytest.approx(0.5 / 10.0)
    s = np.zeros(100_000, dtype=complex)
    noisy = apply_awgn(s, ChannelParams(4.0, 9))
    assert np.var(noisy.real) == pytest.approx(ChannelParams(4.0).sigma2, rel=0.02)


def test_high_snr_error_free():
    bits = BitString(np.random.default_rng(2).integers(0, 2, 100_000))
    y = apply_awgn(modulate(bits), ChannelParams(30.0, 11))
    assert demodulate_hard(y) == bits

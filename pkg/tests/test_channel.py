from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from shortcodes.channel import ChannelParams, hard_decision, llr, modulate_qpsk, stream, transmit
from shortcodes.errors import OddLength

H = math.sqrt(0.5)


def test_mapping_anchor_and_bijection():
    pairs = [(0, 0), (0, 1), (1, 0), (1, 1)]
    syms = [complex(modulate_qpsk(np.array(p))[0]) for p in pairs]
    assert syms[0] == pytest.approx(complex(H, H))
    assert len(set(syms)) == 4
    assert syms == pytest.approx([complex(H, H), complex(H, -H), complex(-H, H), complex(-H, -H)])
    with pytest.raises(OddLength):
        modulate_qpsk(np.zeros(3, np.uint8))


@given(hnp.arrays(np.uint8, st.integers(1, 64).map(lambda m: 2 * m), elements=st.integers(0, 1)))
def test_unit_energy_and_llr_sign_matches_bits(bits):
    x = modulate_qpsk(bits)
    assert np.allclose(np.abs(x) ** 2, 1.0)
    assert np.mean(np.abs(x) ** 2) == pytest.approx(1.0)
    p = ChannelParams(3.0)
    assert np.array_equal(hard_decision(llr(x, p)), bits)


def test_noiseless_llr_value():
    # substituting a = sqrt(1/2) into LLR = 2*sqrt(2)/N0 * y gives 2/N0
    p = ChannelParams(5.0)
    out = llr(modulate_qpsk(np.zeros(2, np.uint8)), p)
    assert out == pytest.approx([2.0 / p.n0] * 2)
    assert llr(np.zeros(3, complex), p).tolist() == [0.0] * 6


def test_transmit_noise_statistics_and_determinism():
    p = ChannelParams(2.0, seed=11)
    x = np.zeros(10**6, complex)
    y = transmit(x, p)
    assert np.array_equal(y, transmit(x, p))
    for part in (y.real, y.imag):
        assert np.var(part) == pytest.approx(p.n0 / 2.0, rel=0.01)
    huge = ChannelParams(400.0)
    sym = modulate_qpsk(np.array([0, 1, 1, 0]))
    assert np.allclose(transmit(sym, huge), sym)


def test_uncoded_bit_error_rate_matches_bpsk():
    p = ChannelParams(4.0)
    rng = stream(7)
    bits = rng.integers(0, 2, 10**6).astype(np.uint8)
    est = hard_decision(llr(transmit(modulate_qpsk(bits), p, rng), p))
    ber = np.mean(est != bits)
    q = 0.5 * math.erfc(math.sqrt(10 ** 0.4) / math.sqrt(2))
    se = math.sqrt(q * (1 - q) / bits.size)
    assert abs(ber - q) < 3 * se


@given(st.integers(0, 2**32 - 1), st.floats(-5, 15))
def test_llr_sufficiency_and_hard_decision(seed, snr):
    p = ChannelParams(snr)
    rng = stream(seed)
    y = transmit(modulate_qpsk(rng.integers(0, 2, 32)), p, rng)
    L = llr(y, p)
    coords = np.empty(32)
    coords[0::2], coords[1::2] = y.real, y.imag
    assert np.array_equal(np.argsort(np.abs(L), kind="stable"), np.argsort(np.abs(coords), kind="stable"))
    assert np.array_equal(hard_decision(L), (np.sign(coords) < 0).astype(np.uint8))


def test_hard_decision_rules():
    assert hard_decision([1.0, 2.0]).tolist() == [0, 0]
    assert hard_decision([0.0, -0.0, -1e-300]).tolist() == [0, 0, 1]


def test_streams_are_keyed():
    a = stream(1, 2, 3).standard_normal(4)
    assert np.array_equal(a, stream(1, 2, 3).standard_normal(4))
    assert not np.array_equal(a, stream(1, 2, 4).standard_normal(4))

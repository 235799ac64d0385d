from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import noisy
from oracles import all_codewords, brute_ml
from shortcodes.codes import attach_crc, build_ebch, build_pac, build_polar, build_random
from shortcodes.codes.polar import static_descriptor
from shortcodes.decoders import make_decoder
from shortcodes.errors import ConfigInvalid, UnsupportedParams
from shortcodes.result import Status
from shortcodes.scfamily import (Mode, SearchConfig, descriptor_for, ebch_descriptor, mean_posterior_entropy,
                                 path_metric_update, sc_decode, scl_decode, scs_decode, search_decode, sq_decode)

CODES = {
    "ebch8": lambda: build_ebch(8, 4),
    "ebch16": lambda: build_ebch(16, 7),
    "rand12": lambda: build_random(12, 6, seed=0),
    "polar16": lambda: build_polar(16, 6),
    "pac16": lambda: build_pac(16, 7),
    "crc16": lambda: attach_crc(16, 5, "CRC4"),
}
_BUILT = {}


def code_named(name):
    if name not in _BUILT:
        _BUILT[name] = CODES[name]()
    return _BUILT[name]


def test_sc_two_bit_hand_evaluation():
    desc = static_descriptor(2, [0, 1])
    r = sc_decode(desc, np.array([5.0, 5.0]))
    assert r.info.tolist() == [0, 0]
    # u0 from f(5, 5) > 0, then u1 from g = 5 + 5 > 0; flipping the second LLR flips u1 only
    r = sc_decode(desc, np.array([5.0, -5.0]))
    assert r.info.tolist() == [1, 1] and r.codeword.tolist() == [0, 1]


def test_path_metric_update():
    assert path_metric_update(0.0, 0.0, 0) == pytest.approx(math.log(2))
    assert path_metric_update(1.0, 60.0, 0) == pytest.approx(1.0, abs=1e-20)
    assert path_metric_update(0.0, 3.0, 1) == pytest.approx(math.log1p(math.exp(3.0)))


@given(st.integers(0, 2**32 - 1), st.floats(-3.0, 6.0))
def test_full_path_metric_is_codeword_likelihood(seed, snr):
    code = code_named("ebch8")
    _, _, L = noisy(code, snr, np.random.default_rng(seed))
    r = scl_decode(descriptor_for(code), L, 16)
    direct = sum(path_metric_update(0.0, l, b) for l, b in zip(L, r.codeword))
    assert r.score == pytest.approx(direct, rel=1e-9, abs=1e-9)
    assert r.score >= 0.0


def test_ebch_descriptor_codeword_set():
    code = code_named("ebch8")
    desc = ebch_descriptor(code)
    assert int(np.count_nonzero(desc.is_frozen)) == code.n - code.k
    words = set()
    for bits in itertools.product((0, 1), repeat=desc.info_set.size):
        u = np.zeros(desc.n, np.uint8)
        u[desc.info_set] = bits
        for i in range(desc.n):
            if desc.is_frozen[i]:
                u[i] = int(desc.frozen_masks[i] @ u) & 1
        words.add(tuple(desc.encode_inputs(u)))
    assert words == {tuple(c) for c in all_codewords(code.G.to_array())}
    with pytest.raises(UnsupportedParams):
        ebch_descriptor(build_random(12, 6))


@given(st.sampled_from(sorted(CODES)), st.integers(0, 2**32 - 1), st.sampled_from([0.0, 2.0, 4.0]),
       st.sampled_from(["SCL", "SCS", "SQ0"]))
def test_saturated_search_is_ml(name, seed, snr, mode):
    code = code_named(name)
    desc = descriptor_for(code)
    _, _, L = noisy(code, snr, np.random.default_rng(seed))
    full = 1 << desc.info_set.size
    if mode == "SCL":
        r = scl_decode(desc, L, full)
    elif mode == "SCS":
        r = scs_decode(desc, L, full, stack_cap=full * desc.n)
    else:
        r = sq_decode(desc, L, full, bias=0.0, stack_cap=full * desc.n)
    assert r.status is Status.OK
    assert np.array_equal(r.codeword, brute_ml(code.G.to_array(), L))
    assert code.is_codeword(r.codeword)


@given(st.sampled_from(sorted(CODES)), st.integers(0, 2**32 - 1), st.floats(-2.0, 6.0))
def test_scl_one_is_sc(name, seed, snr):
    desc = descriptor_for(code_named(name))
    _, _, L = noisy(code_named(name), snr, np.random.default_rng(seed))
    a, b = sc_decode(desc, L), scl_decode(desc, L, 1)
    assert np.array_equal(a.codeword, b.codeword) and np.array_equal(a.info, b.info) and a.status == b.status
    assert a.score == pytest.approx(b.score)
    assert a.work == b.work


@given(st.integers(0, 2**32 - 1), st.floats(-1.0, 5.0), st.integers(1, 6))
def test_sq_zero_bias_is_scs(seed, snr, logL):
    code = build_ebch(32, 16) if "e32" not in _BUILT else _BUILT["e32"]
    _BUILT["e32"] = code
    desc = descriptor_for(code)
    _, _, L = noisy(code, snr, np.random.default_rng(seed))
    a = scs_decode(desc, L, 1 << logL)
    b = sq_decode(desc, L, 1 << logL, bias=0.0)
    assert np.array_equal(a.codeword, b.codeword) and a.status == b.status and a.work == b.work
    if a.status is Status.OK:
        assert code.is_codeword(a.codeword)


def test_zero_noise_single_path():
    code = build_polar(64, 32)
    desc = descriptor_for(code)
    u = np.random.default_rng(0).integers(0, 2, 32)
    c = code.encode(u)
    L = 20.0 * (1.0 - 2.0 * c)
    for r in (sc_decode(desc, L), scl_decode(desc, L, 4), scs_decode(desc, L, 4), sq_decode(desc, L, 4)):
        assert np.array_equal(r.codeword, c) and r.status is Status.OK
    # one path: the SC tree is walked once; the stack search adds only the frozen
    # runs of the rejected siblings, which are stored but never popped
    assert sc_decode(desc, L).work == 64 * 6
    assert sc_decode(desc, L).work <= scs_decode(desc, L, 4).work < 2 * 64 * 6


def test_sc_visits_n_log_n_nodes():
    for n in (64, 128):
        desc = descriptor_for(build_polar(n, n // 2))
        r = sc_decode(desc, np.ones(n))
        assert r.work == n * int(math.log2(n))


def test_crc_polar_list_prefers_crc_passing_path():
    code = attach_crc(32, 10, "CRC6")
    desc = descriptor_for(code)
    rng = np.random.default_rng(4)
    for _ in range(200):
        _, _, L = noisy(code, 1.0, rng)
        r = scl_decode(desc, L, 8)
        if r.status is Status.OK:
            assert code.is_codeword(r.codeword)


def test_op_cap_and_config_errors():
    code = build_ebch(64, 36)
    desc = descriptor_for(code)
    _, _, L = noisy(code, 1.0, np.random.default_rng(2))
    r = scl_decode(desc, L, 32, op_cap=1000)
    assert r.status is Status.ABANDONED and not r.found
    with pytest.raises(ConfigInvalid):
        SearchConfig(L=0)
    with pytest.raises(ConfigInvalid):
        SearchConfig(L=8, stack_cap=4)
    assert SearchConfig(L=4).cap == 64
    assert SearchConfig(mode="sq".upper()).mode is Mode.SQ


def test_mean_posterior_entropy():
    assert mean_posterior_entropy([0.0]) == pytest.approx(math.log(2))
    assert mean_posterior_entropy([50.0, -50.0]) == pytest.approx(0.0, abs=1e-15)


def test_registry_dispatch(ebch8):
    rng = np.random.default_rng(0)
    _, _, L = noisy(ebch8, 2.0, rng)
    ml = brute_ml(ebch8.G.to_array(), L)
    for spec in ({"name": "ml"}, {"name": "osd", "order": 4}, {"name": "grand", "ordering": "exact"},
                 {"name": "scl", "L": 16}, {"name": "scs", "L": 16, "stack_cap": 256},
                 {"name": "sq", "L": 16, "bias": 0.0, "stack_cap": 256}):
        r = make_decoder(ebch8, spec)(L)
        assert np.array_equal(r.codeword, ml), spec
        assert np.array_equal(ebch8.encode(r.info), r.codeword)
    with pytest.raises(ConfigInvalid):
        make_decoder(ebch8, {"name": "bp"})
    with pytest.raises(ConfigInvalid):
        make_decoder(ebch8, {"name": "osd", "depth": 3})


def test_search_decode_dispatch():
    code = code_named("polar16")
    desc = descriptor_for(code)
    _, _, L = noisy(code, 2.0, np.random.default_rng(1))
    for mode in Mode:
        r = search_decode(desc, L, SearchConfig(mode=mode, L=4))
        assert r.codeword.size == 16

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from oracles import bitloop_encode, bitloop_syndrome, naive_rank, naive_rref
from shortcodes.errors import DimensionMismatch, RankDeficient
from shortcodes.gf2 import (BitMatrix, Permutation, dual, encode, encode_many, gauss_systematic, inverse,
                            pack_rows, rank, syndrome, unpack_rows)


def bit_arrays(max_rows=12, max_cols=80):
    shape = st.tuples(st.integers(1, max_rows), st.integers(1, max_cols))
    return shape.flatmap(lambda s: hnp.arrays(np.uint8, s, elements=st.integers(0, 1)))


def full_rank(rng, k, n):
    while True:
        G = rng.integers(0, 2, (k, n), dtype=np.uint8)
        if naive_rank(G) == k:
            return G


@given(bit_arrays(max_cols=150))
def test_pack_roundtrip(bits):
    assert np.array_equal(unpack_rows(pack_rows(bits), bits.shape[1]), bits)


def test_packed_layout_is_little_endian_per_word():
    bits = np.zeros((1, 70), dtype=np.uint8)
    bits[0, [0, 63, 64, 69]] = 1
    w = pack_rows(bits)
    assert w.shape == (1, 2)
    assert int(w[0, 0]) == (1 | (1 << 63))
    assert int(w[0, 1]) == (1 | (1 << 5))


@given(bit_arrays())
def test_rank_matches_naive_elimination(bits):
    assert rank(BitMatrix.from_array(bits)) == naive_rank(bits)


@given(bit_arrays(max_rows=8, max_cols=40), st.data())
def test_encode_matches_bitloop(bits, data):
    u = data.draw(hnp.arrays(np.uint8, bits.shape[0], elements=st.integers(0, 1)))
    G = BitMatrix.from_array(bits)
    assert np.array_equal(encode(G, u), bitloop_encode(bits, u))
    assert np.array_equal(encode_many(G, u[None, :])[0], bitloop_encode(bits, u))


@given(st.integers(0, 2**32 - 1), st.integers(1, 10), st.integers(0, 40))
def test_dual_is_orthogonal_and_full_rank(seed, k, extra):
    rng = np.random.default_rng(seed)
    n = k + 1 + extra
    G = full_rank(rng, k, n)
    H = dual(BitMatrix.from_array(G))
    assert H.shape == (n - k, n)
    assert naive_rank(H.to_array()) == n - k
    Ha = H.to_array()
    for row in G:
        assert not bitloop_syndrome(Ha, row).any()
        assert not syndrome(H, row).any()


@given(st.integers(0, 2**32 - 1), st.integers(1, 10), st.integers(0, 30))
def test_gauss_systematic_respects_priority(seed, k, extra):
    rng = np.random.default_rng(seed)
    n = k + extra
    G = full_rank(rng, k, n)
    prio = Permutation(rng.permutation(n))
    Gsys, eff = gauss_systematic(BitMatrix.from_array(G), prio)
    A = Gsys.to_array()
    assert np.array_equal(A[:, :k], np.eye(k, dtype=np.uint8))
    # same row space as the column-permuted original
    perm = G[:, eff.map]
    assert naive_rank(np.vstack([perm, A])) == k
    # pivots are the first k independent columns in priority order
    chosen = []
    for c in prio.map:
        trial = np.hstack([G[:, chosen], G[:, [c]]])
        if naive_rank(trial) > len(chosen):
            chosen.append(int(c))
        if len(chosen) == k:
            break
    assert list(eff.map[:k]) == chosen


def test_rref_oracle_agrees_on_example():
    M = np.array([[1, 1, 0, 1], [1, 1, 1, 0], [0, 0, 1, 1]], dtype=np.uint8)
    R, piv = naive_rref(M)
    assert piv == [0, 2]
    assert rank(BitMatrix.from_array(M)) == 2


@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_inverse_roundtrip(seed, k):
    B = full_rank(np.random.default_rng(seed), k, k)
    inv = inverse(BitMatrix.from_array(B)).to_array()
    assert np.array_equal((B.astype(int) @ inv) & 1, np.eye(k, dtype=int))


@given(st.permutations(list(range(12))))
def test_permutation_inverse(p):
    P = Permutation(np.array(p))
    x = np.arange(12)
    assert np.array_equal(P.inverse().apply(P.apply(x)), x)


def test_errors():
    with pytest.raises(RankDeficient):
        inverse(BitMatrix.from_array(np.array([[1, 1], [1, 1]], np.uint8)))
    with pytest.raises(RankDeficient):
        gauss_systematic(BitMatrix.from_array(np.array([[1, 0, 1], [1, 0, 1]], np.uint8)))
    with pytest.raises(DimensionMismatch):
        encode(BitMatrix.identity(3), [1, 0])
    with pytest.raises(DimensionMismatch):
        syndrome(BitMatrix.identity(3), [1, 0, 1, 1])
    with pytest.raises(DimensionMismatch):
        dual(BitMatrix.identity(4))

"""Bit-packed linear algebra over GF(2).

Rows are stored as little-endian 64-bit words: column ``c`` of a row lives in
word ``c >> 6`` at bit ``c & 63``. Padding bits past ``cols`` are always zero,
so two rows are equal iff their words are equal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import DimensionMismatch, RankDeficient

WORD = 64


def n_words(cols: int) -> int:
    return (cols + WORD - 1) // WORD


def pack_rows(bits) -> np.ndarray:
    """Pack a 2-D 0/1 array into ``(rows, n_words(cols))`` uint64 words."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    rows, cols = bits.shape
    padded = np.zeros((rows, n_words(cols) * WORD), dtype=np.uint8)
    padded[:, :cols] = bits & 1
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def unpack_rows(words: np.ndarray, cols: int) -> np.ndarray:
    words = np.ascontiguousarray(np.atleast_2d(words), dtype="<u8")
    bits = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")
    return bits[:, :cols]


@numba.njit(cache=True)
def rref_packed(M, ncols):
    """Reduce ``M`` in place to reduced row-echelon form, scanning columns left to right.

    Returns ``(pivots, skipped, row_xors, scans)``: pivot columns in order, the
    dependent columns met before the last pivot was placed, the number of row
    XORs performed and the number of pivot-search probes.
    """
    rows, W = M.shape
    pivots = np.empty(rows, np.int64)
    skipped = np.empty(ncols, np.int64)
    npiv = 0
    nskip = 0
    row_xors = 0
    scans = 0
    for j in range(ncols):
        if npiv == rows:
            break
        w = j >> 6
        bit = np.uint64(1) << np.uint64(j & 63)
        r = npiv
        while r < rows and (M[r, w] & bit) == 0:
            r += 1
        scans += r - npiv + 1
        if r == rows:
            skipped[nskip] = j
            nskip += 1
            continue
        if r != npiv:
            for x in range(W):
                t = M[r, x]
                M[r, x] = M[npiv, x]
                M[npiv, x] = t
        for rr in range(rows):
            if rr != npiv and (M[rr, w] & bit) != 0:
                for x in range(W):
                    M[rr, x] ^= M[npiv, x]
                row_xors += 1
        pivots[npiv] = j
        npiv += 1
    return pivots[:npiv], skipped[:nskip], row_xors, scans


@numba.njit(cache=True)
def permute_packed(M, cols, perm):
    """Column-permute packed rows: column ``j`` of the result is column ``perm[j]`` of ``M``."""
    rows = M.shape[0]
    out = np.zeros((rows, (cols + 63) >> 6), np.uint64)
    for j in range(cols):
        src = perm[j]
        sw = src >> 6
        sb = np.uint64(src & 63)
        dw = j >> 6
        db = np.uint64(j & 63)
        for r in range(rows):
            out[r, dw] |= ((M[r, sw] >> sb) & np.uint64(1)) << db
    return out


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``{0..n-1}``; ``map[j]`` is the original index placed at slot ``j``."""

    map: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.map, dtype=np.int64)
        if m.ndim != 1 or not np.array_equal(np.sort(m), np.arange(m.size)):
            raise ValueError("Permutation map must be a bijection on 0..n-1")
        m.setflags(write=False)
        object.__setattr__(self, "map", m)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    def __len__(self) -> int:
        return self.map.size

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.map)
        inv[self.map] = np.arange(self.map.size)
        return Permutation(inv)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Reorder a vector (or the last axis of an array) into permuted order."""
        return np.asarray(x)[..., self.map]

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.map, other.map)

    def __hash__(self) -> int:
        return hash(self.map.tobytes())


class BitMatrix:
    """Immutable packed binary matrix."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray):
        if rows < 1 or cols < 1:
            raise DimensionMismatch(f"BitMatrix needs rows, cols >= 1, got {rows}x{cols}")
        data = np.array(data, dtype=np.uint64, copy=True).reshape(rows, n_words(cols))
        tail = cols % WORD
        if tail:
            data[:, -1] &= np.uint64((1 << tail) - 1)
        data.setflags(write=False)
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def from_array(cls, bits) -> "BitMatrix":
        bits = np.atleast_2d(np.asarray(bits))
        return cls(bits.shape[0], bits.shape[1], pack_rows(bits))

    @classmethod
    def identity(cls, k: int) -> "BitMatrix":
        return cls.from_array(np.eye(k, dtype=np.uint8))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_array(self) -> np.ndarray:
        return unpack_rows(self.data, self.cols)

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(rc)
        return int((int(self.data[r, c >> 6]) >> (c & 63)) & 1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.shape == other.shape
            and np.array_equal(self.data, other.data)
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"

    def permute_columns(self, perm: Permutation | np.ndarray) -> "BitMatrix":
        m = perm.map if isinstance(perm, Permutation) else np.asarray(perm, dtype=np.int64)
        return BitMatrix(self.rows, m.size, permute_packed(self.data, m.size, m))

    def select_columns(self, cols) -> "BitMatrix":
        return BitMatrix.from_array(self.to_array()[:, np.asarray(cols, dtype=np.int64)])

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_array(self.to_array().T)

    def matmul(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        prod = (self.to_array().astype(np.int64) @ other.to_array().astype(np.int64)) & 1
        return BitMatrix.from_array(prod)

    def is_zero(self) -> bool:
        return not self.data.any()


def rank(M: BitMatrix) -> int:
    work = M.data.copy()
    pivots, _, _, _ = rref_packed(work, M.cols)
    return int(pivots.size)


def gauss_systematic(G: BitMatrix, priority: Permutation | None = None) -> tuple[BitMatrix, Permutation]:
    """Bring ``G`` to ``[I_k | P]`` with pivots chosen by column priority.

    Columns are tried in ``priority`` order; a column dependent on the
    already chosen ones is displaced and placed right after the ``k`` pivot
    columns, followed by the untouched tail of the priority order.

    Returns:
        ``(Gsys, effective)`` where column ``j`` of ``Gsys`` corresponds to
        original column ``effective.map[j]``.

    Raises:
        RankDeficient: if ``rank(G) < k``.
    """
    k, n = G.shape
    if priority is None:
        priority = Permutation.identity(n)
    if len(priority) != n:
        raise DimensionMismatch(f"priority has length {len(priority)}, G has {n} columns")
    work = permute_packed(G.data, n, priority.map)
    pivots, skipped, _, _ = rref_packed(work, n)
    if pivots.size < k:
        raise RankDeficient(f"rank {pivots.size} < k={k}")
    last = int(pivots[-1])
    order = np.concatenate([pivots, skipped, np.arange(last + 1, n)])
    Gsys = BitMatrix(k, n, permute_packed(work, n, order))
    return Gsys, Permutation(priority.map[order])


def _as_bits(v, length: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.uint8).ravel()
    if v.size != length:
        raise DimensionMismatch(f"{name} has length {v.size}, expected {length}")
    return v & 1


def encode(G: BitMatrix, u) -> np.ndarray:
    """Return ``u @ G`` over GF(2) as a length-``n`` uint8 vector."""
    u = _as_bits(u, G.rows, "u")
    acc = np.bitwise_xor.reduce(G.data[u.astype(bool)], axis=0) if u.any() else np.zeros(G.data.shape[1], np.uint64)
    return unpack_rows(acc[None, :], G.cols)[0]


def encode_many(G: BitMatrix, U: np.ndarray) -> np.ndarray:
    """Row-wise ``U @ G`` for a ``(batch, k)`` array of messages."""
    U = np.asarray(U, dtype=np.int64)
    if U.ndim != 2 or U.shape[1] != G.rows:
        raise DimensionMismatch(f"messages shape {U.shape} vs G {G.shape}")
    return ((U @ G.to_array().astype(np.int64)) & 1).astype(np.uint8)


def syndrome(H: BitMatrix, v) -> np.ndarray:
    """Return ``H @ v^T`` over GF(2); all-zero iff ``v`` is a codeword."""
    v = _as_bits(v, H.cols, "v")
    vw = pack_rows(v[None, :])[0]
    return (np.bitwise_count(H.data & vw).sum(axis=1) & 1).astype(np.uint8)


def inverse(B: BitMatrix) -> BitMatrix:
    """Inverse of a square non-singular matrix."""
    k = B.rows
    if B.cols != k:
        raise DimensionMismatch("inverse needs a square matrix")
    aug = np.hstack([B.to_array(), np.eye(k, dtype=np.uint8)])
    work = pack_rows(aug)
    pivots, _, _, _ = rref_packed(work, k)
    if pivots.size < k:
        raise RankDeficient("matrix is singular")
    return BitMatrix.from_array(unpack_rows(work, 2 * k)[:, k:])


def dual(G: BitMatrix) -> BitMatrix:
    """A full-rank ``(n-k) x n`` parity-check matrix for the row space of ``G``."""
    k, n = G.shape
    if k == n:
        raise DimensionMismatch("full-space code has no parity checks")
    Gsys, eff = gauss_systematic(G)
    P = Gsys.to_array()[:, k:]
    Hsys = np.hstack([P.T, np.eye(n - k, dtype=np.uint8)])
    H = np.empty_like(Hsys)
    H[:, eff.map] = Hsys
    return BitMatrix.from_array(H)

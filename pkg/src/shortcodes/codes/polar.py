"""Polar-transform codes: polar, CRC-aided polar and PAC, plus the
dynamic-frozen descriptor that lets tree-search decoders handle any binary
linear code whose length is (padded to) a power of two.

The transform is ``c = u @ F`` with ``F = [[1, 0], [1, 1]]^{(x) m}`` in
natural index order, so ``c = [(u_lo ^ u_hi) F', u_hi F']``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import UnsupportedParams
from ..gf2 import BitMatrix, pack_rows, rref_packed, unpack_rows
from .core import Code, CodeSpec, Family

# CRC generator polynomials (bit i = coefficient of D^i).
# CRC11: gCRC11(D) = D^11 + D^10 + D^9 + D^5 + 1 (3GPP TS 38.212 5.1).
CRC_POLYS = {
    "CRC11": 0xE21,
    "CRC6": 0x61,
    "CRC4": 0x13,
}

# Degree-6 convolutional precoder with taps {0, 2, 3, 5, 6}.
PAC_CONV_POLY = (1, 0, 1, 1, 0, 1, 1)


def is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def polar_transform(u: np.ndarray) -> np.ndarray:
    """Butterfly evaluation of ``u @ F`` along the last axis."""
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    if not is_pow2(n):
        raise UnsupportedParams(f"polar length must be a power of two, got {n}")
    half = n // 2
    while half >= 1:
        y = x.reshape(*x.shape[:-1], -1, 2, half)
        y[..., 0, :] ^= y[..., 1, :]
        half //= 2
    return x


def polar_matrix(n: int) -> np.ndarray:
    return polar_transform(np.eye(n, dtype=np.uint8))


def bhattacharyya(n: int, z0: float = 0.5) -> np.ndarray:
    """Bhattacharyya parameters of the ``n`` synthetic channels (natural order).

    Evaluated in the log domain; index bit order is MSB = first split.
    """
    if not is_pow2(n):
        raise UnsupportedParams(f"polar length must be a power of two, got {n}")
    logz = np.array([np.log(z0)])
    while logz.size < n:
        worse = logz + np.log(2.0 - np.exp(logz))
        better = 2.0 * logz
        logz = np.stack([worse, better], axis=1).ravel()
    return np.exp(logz)


def design_z0(design_snr_db: float | None) -> float:
    """Initial Bhattacharyya parameter: 0.5, or that of the coded-bit channel at a design Es/N0."""
    if design_snr_db is None:
        return 0.5
    # per coded bit the channel is BPSK with SNR Es/(2 N0), Z = exp(-Es/(2 N0))
    return float(np.exp(-(10.0 ** (design_snr_db / 10.0)) / 2.0))


def reliability_order(n: int, design_snr_db: float | None = None) -> np.ndarray:
    """Synthetic channel indices, most reliable first (ties: higher index first)."""
    z = bhattacharyya(n, design_z0(design_snr_db))
    return np.lexsort((-np.arange(n), z))


def crc_remainder(bits, poly: int) -> np.ndarray:
    """CRC parity of ``bits`` (first bit = highest degree), zero-initialised."""
    r = poly.bit_length() - 1
    reg = 0
    for b in np.asarray(bits, dtype=np.uint8).ravel():
        top = ((reg >> (r - 1)) & 1) ^ int(b)
        reg = (reg << 1) & ((1 << r) - 1)
        if top:
            reg ^= poly & ((1 << r) - 1)
    return np.array([(reg >> (r - 1 - i)) & 1 for i in range(r)], dtype=np.uint8)


def crc_matrix(k: int, poly: int) -> np.ndarray:
    """``(k, r)`` matrix whose rows are the CRC of each unit payload."""
    return np.array([crc_remainder(np.eye(k, dtype=np.uint8)[i], poly) for i in range(k)],
                    dtype=np.uint8).reshape(k, poly.bit_length() - 1)


@dataclass(frozen=True)
class PolarDescriptor:
    """Polar-transform description of a code for the SC decoder family.

    ``frozen_masks[i]`` lists (as a 0/1 row) the earlier inputs whose XOR
    fixes ``u_i`` when ``is_frozen[i]``; an all-zero row is a static frozen
    bit. ``positions[c]`` is the transform index carrying code column ``c``;
    transform indices not hit by any column are shortened (known zero).
    ``check``, when set, is a parity-check matrix in code coordinates that a
    full path must satisfy (CRC selection).
    """

    n: int
    info_set: np.ndarray
    frozen_masks: np.ndarray
    is_frozen: np.ndarray
    positions: np.ndarray
    crc_poly: int | None = None
    conv_poly: tuple[int, ...] | None = None
    check: BitMatrix | None = field(default=None, compare=False)

    def __post_init__(self):
        info = np.asarray(self.info_set, dtype=np.int64)
        if not is_pow2(self.n):
            raise UnsupportedParams("descriptor length must be a power of two")
        if info.size and np.any(np.diff(info) <= 0):
            raise ValueError("info_set must be strictly increasing")
        if info.size + int(np.count_nonzero(self.is_frozen)) != self.n:
            raise ValueError("info and frozen sets must partition the inputs")
        for name in ("info_set", "frozen_masks", "is_frozen", "positions"):
            arr = np.ascontiguousarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def code_length(self) -> int:
        return self.positions.size

    @property
    def is_static(self) -> bool:
        return not self.frozen_masks.any()

    def embed_llr(self, llr: np.ndarray, big: float = 1e3) -> np.ndarray:
        """Place code-order LLRs onto transform positions; shortened ones get ``+big``."""
        out = np.full(self.n, big)
        out[self.positions] = llr
        return out

    def extract(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x)[..., self.positions]

    def encode_inputs(self, u: np.ndarray) -> np.ndarray:
        return self.extract(polar_transform(u))


def static_descriptor(n: int, info_set, *, crc_poly=None, check=None) -> PolarDescriptor:
    info = np.sort(np.asarray(info_set, dtype=np.int64))
    frozen = np.ones(n, dtype=bool)
    frozen[info] = False
    return PolarDescriptor(n, info, np.zeros((n, n), dtype=np.uint8), frozen, np.arange(n),
                           crc_poly=crc_poly, check=check)


def descriptor_from_constraints(n: int, A: np.ndarray, positions: np.ndarray, **kw) -> PolarDescriptor:
    """Dynamic-frozen descriptor from linear constraints ``A @ u = 0``.

    Rows are reduced right-to-left so each constraint ends at a distinct
    input index; that index becomes frozen as the XOR of the earlier ones.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.uint8))
    rev = A[:, ::-1]
    work = pack_rows(rev)
    pivots, _, _, _ = rref_packed(work, n)
    red = unpack_rows(work[: pivots.size], n)[:, ::-1]
    frozen = np.zeros(n, dtype=bool)
    masks = np.zeros((n, n), dtype=np.uint8)
    for row, p in zip(red, n - 1 - pivots):
        frozen[p] = True
        mask = row.copy()
        mask[p] = 0
        masks[p] = mask
    info = np.flatnonzero(~frozen)
    return PolarDescriptor(n, info, masks, frozen, np.asarray(positions, dtype=np.int64), **kw)


def linear_descriptor(code: Code, positions=None) -> PolarDescriptor:
    """Describe any linear code on the polar tree via dynamic frozen bits.

    Lengths that are not a power of two are padded with shortened inputs.
    ``positions[c]`` assigns code column ``c`` to a transform index.
    """
    n = code.n
    N = 1 << max(0, (n - 1).bit_length())
    if positions is None:
        positions = np.arange(n)
    positions = np.asarray(positions, dtype=np.int64)
    if positions.size != n or np.unique(positions).size != n or positions.max() >= N:
        raise UnsupportedParams("positions must be distinct transform indices")
    pad = np.setdiff1d(np.arange(N), positions)
    rows = []
    if code.H is not None:
        Hc = np.zeros((code.n - code.k, N), dtype=np.uint8)
        Hc[:, positions] = code.H.to_array()
        rows.append(Hc)
    if pad.size:
        unit = np.zeros((pad.size, N), dtype=np.uint8)
        unit[np.arange(pad.size), pad] = 1
        rows.append(unit)
    if not rows:
        return static_descriptor(N, np.arange(N))
    Hfull = np.vstack(rows)
    F = polar_matrix(N)
    A = (Hfull.astype(np.int64) @ F.T.astype(np.int64)) & 1
    return descriptor_from_constraints(N, A, positions)


def _check_pow2(n: int, k: int) -> None:
    if not is_pow2(n):
        raise UnsupportedParams(f"polar length must be a power of two, got {n}")
    if not 1 <= k <= n:
        raise UnsupportedParams(f"need 1 <= k <= n, got k={k}")


def _order(n: int, design_snr_db, reliability) -> np.ndarray:
    if reliability is None:
        return reliability_order(n, design_snr_db)
    seq = np.asarray(reliability, dtype=np.int64)
    seq = seq[seq < n]
    if np.unique(seq).size != n:
        raise UnsupportedParams(f"reliability sequence does not cover 0..{n - 1}")
    return seq


def build_polar(n: int, k: int, design_snr_db: float | None = None, reliability=None) -> Code:
    """Polar code; ``reliability`` (most reliable first, e.g. a loaded 5G sequence) overrides the design rule."""
    _check_pow2(n, k)
    info = np.sort(_order(n, design_snr_db, reliability)[:k])
    F = polar_matrix(n)
    desc = static_descriptor(n, info)
    spec = CodeSpec(Family.POLAR, n, k, {"design_snr_db": design_snr_db, "info_set": info.tolist()})
    return Code(spec, BitMatrix.from_array(F[info]), descriptor=desc)


def attach_crc(n: int, k_payload: int, crc_poly: int | str = "CRC11",
               design_snr_db: float | None = None, reliability=None) -> Code:
    """CRC-aided polar code: payload followed by its CRC on a polar information set."""
    poly = CRC_POLYS[crc_poly] if isinstance(crc_poly, str) else int(crc_poly)
    r = poly.bit_length() - 1
    if k_payload + r > n:
        raise UnsupportedParams(f"payload {k_payload} + CRC {r} exceeds n={n}")
    _check_pow2(n, k_payload + r)
    info = np.sort(_order(n, design_snr_db, reliability)[: k_payload + r])
    F = polar_matrix(n)
    V = np.hstack([np.eye(k_payload, dtype=np.uint8), crc_matrix(k_payload, poly)])
    G = (V.astype(np.int64) @ F[info].astype(np.int64)) & 1
    spec = CodeSpec(Family.CRC_POLAR, n, k_payload,
                    {"crc_poly": hex(poly), "design_snr_db": design_snr_db, "info_set": info.tolist()})
    code = Code(spec, BitMatrix.from_array(G))
    code.descriptor = static_descriptor(n, info, crc_poly=poly, check=code.H)
    return code


def rm_rate_profile(n: int, k: int, design_snr_db: float | None = None) -> np.ndarray:
    """Indices of the ``k`` heaviest rows of ``F``; ties go to the more reliable channel."""
    weight = np.array([bin(i).count("1") for i in range(n)])
    z = bhattacharyya(n, design_z0(design_snr_db))
    order = np.lexsort((-np.arange(n), z, -weight))
    return np.sort(order[:k])


def conv_matrix(n: int, conv_poly) -> np.ndarray:
    """Upper-triangular Toeplitz precoder ``T`` with ``u = v @ T``."""
    g = np.asarray(conv_poly, dtype=np.uint8)
    T = np.zeros((n, n), dtype=np.uint8)
    for j in range(n):
        for d, gd in enumerate(g):
            if gd and j + d < n:
                T[j, j + d] = 1
    return T


def build_pac(n: int, k: int, conv_poly=PAC_CONV_POLY, rate_profile=None) -> Code:
    _check_pow2(n, k)
    conv_poly = tuple(int(x) for x in conv_poly)
    if not conv_poly or conv_poly[0] != 1:
        raise UnsupportedParams("precoder must have g0 = 1")
    info = np.sort(np.asarray(rm_rate_profile(n, k) if rate_profile is None else rate_profile, dtype=np.int64))
    if info.size != k:
        raise UnsupportedParams("rate profile size must equal k")
    T = conv_matrix(n, conv_poly)
    F = polar_matrix(n)
    G = (T[info].astype(np.int64) @ F.astype(np.int64)) & 1
    spec = CodeSpec(Family.PAC, n, k, {"conv_poly": list(conv_poly), "info_set": info.tolist()})
    code = Code(spec, BitMatrix.from_array(G))
    desc = linear_descriptor(code)
    code.descriptor = PolarDescriptor(desc.n, desc.info_set, desc.frozen_masks, desc.is_frozen,
                                      desc.positions, conv_poly=conv_poly)
    return code


def pac_encode(v_info: np.ndarray, n: int, info_set, conv_poly=PAC_CONV_POLY) -> np.ndarray:
    """Reference PAC encoder: place, convolve with a shift register, transform."""
    v = np.zeros(n, dtype=np.uint8)
    v[np.asarray(info_set)] = v_info
    g = np.asarray(conv_poly, dtype=np.uint8)
    state = np.zeros(g.size - 1, dtype=np.uint8)
    u = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        u[i] = (g[0] & v[i]) ^ (np.bitwise_and(g[1:], state).sum() & 1)
        state = np.concatenate([[v[i]], state[:-1]])
    return polar_transform(u)

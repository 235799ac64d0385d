from __future__ import annotations

import numpy as np
from scipy.special import erfc

from ..errors import UnsupportedParams
from ..gf2 import BitMatrix

EXHAUSTIVE_MAX_K = 20


def codeword_words(G: BitMatrix) -> np.ndarray:
    """All ``2**k`` codewords as packed rows; row ``u`` is the codeword of message ``u``
    (bit ``i`` of ``u`` selects row ``i`` of ``G``)."""
    k = G.rows
    if k > EXHAUSTIVE_MAX_K:
        raise UnsupportedParams(f"exhaustive enumeration needs k <= {EXHAUSTIVE_MAX_K}, got {k}")
    cw = np.zeros((1 << k, G.data.shape[1]), dtype=np.uint64)
    for i in range(k):
        cw[1 << i : 2 << i] = cw[: 1 << i] ^ G.data[i]
    return cw


def codeword_weights(G: BitMatrix) -> np.ndarray:
    return np.bitwise_count(codeword_words(G)).sum(axis=1).astype(np.int64)


def weight_spectrum(code_or_G, mode: str = "EXHAUSTIVE") -> np.ndarray:
    """Weight enumerator ``A_0..A_n`` by exhaustive enumeration of the codebook."""
    if str(mode).upper() != "EXHAUSTIVE":
        raise UnsupportedParams(f"unknown spectrum mode {mode!r}")
    G = code_or_G if isinstance(code_or_G, BitMatrix) else code_or_G.G
    return np.bincount(codeword_weights(G), minlength=G.cols + 1)


def min_distance(spectrum: np.ndarray) -> int:
    nz = np.flatnonzero(np.asarray(spectrum)[1:])
    return int(nz[0] + 1) if nz.size else 0


def qfunc(x):
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def pairwise_error(d, esn0_db: float):
    """Q(sqrt(d Es/N0)): probability of preferring a codeword at distance ``d``."""
    return qfunc(np.sqrt(np.asarray(d, dtype=float) * 10.0 ** (esn0_db / 10.0)))


def union_bound_raw(spectrum, esn0_db: float) -> float:
    A = np.asarray(spectrum, dtype=float)
    d = np.arange(A.size)
    return float(np.sum(A[1:] * pairwise_error(d[1:], esn0_db)))


def union_bound(spectrum, esn0_db: float) -> float:
    """Union bound on BLER, clamped to 1."""
    return min(1.0, union_bound_raw(spectrum, esn0_db))

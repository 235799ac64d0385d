"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here touches the packed kernels of the package under test.
"""

from __future__ import annotations

import itertools
import math

import mpmath
import numpy as np


def naive_rref(M):
    """Reduced row echelon form by plain list-of-lists elimination; returns (R, pivots)."""
    R = [list(int(x) & 1 for x in row) for row in np.asarray(M)]
    rows, cols = len(R), len(R[0]) if R else 0
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if R[i][c]), None)
        if pr is None:
            continue
        R[r], R[pr] = R[pr], R[r]
        for i in range(rows):
            if i != r and R[i][c]:
                R[i] = [a ^ b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return np.array(R, dtype=np.uint8), pivots


def naive_rank(M) -> int:
    return len(naive_rref(M)[1])


def bitloop_encode(G, u):
    G = np.asarray(G)
    k, n = G.shape
    out = []
    for j in range(n):
        s = 0
        for i in range(k):
            s ^= int(u[i]) & int(G[i][j])
        out.append(s)
    return np.array(out, dtype=np.uint8)


def bitloop_syndrome(H, v):
    return bitloop_encode(np.asarray(H).T, v)


def all_codewords(G):
    G = np.asarray(G)
    k = G.shape[0]
    return np.array([bitloop_encode(G, u) for u in itertools.product((0, 1), repeat=k)], dtype=np.uint8)


def brute_ml(G, llr):
    """Codeword minimising the correlation discrepancy; ties go to the first in message order.

    Message order here is the package convention: bit ``i`` of the message
    index selects row ``i``.
    """
    G = np.asarray(G, dtype=np.int64)
    k = G.shape[0]
    idx = np.arange(1 << k)
    messages = (idx[:, None] >> np.arange(k)[None, :]) & 1
    words = (messages @ G) & 1
    llr = np.asarray(llr, dtype=float)
    hard = (llr < 0).astype(np.int64)
    costs = ((words != hard) * np.abs(llr)).sum(axis=1)
    return words[int(np.argmin(costs))].astype(np.uint8)


def mp_q(x) -> mpmath.mpf:
    return mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2)) / 2


def mp_union_bound(spectrum, esn0_db):
    with mpmath.workdps(40):
        g = mpmath.mpf(10) ** (mpmath.mpf(esn0_db) / 10)
        return sum(int(a) * mp_q(mpmath.sqrt(d * g)) for d, a in enumerate(spectrum) if d >= 1)


def trapezoid_na(n, k, esn0_db, half_width=40.0, points=400001):
    """Normal approximation with C and V from a fine trapezoidal grid over the LLR density."""
    g = 10.0 ** (esn0_db / 10.0)
    mu, sd = 2.0 * g, 2.0 * math.sqrt(g)
    x = np.linspace(mu - half_width * sd / 4, mu + half_width * sd / 4, points)
    pdf = np.exp(-0.5 * ((x - mu) / sd) ** 2) / (sd * math.sqrt(2 * math.pi))
    info = 1.0 - np.logaddexp(0.0, -x) / math.log(2.0)
    C = np.trapezoid(pdf * info, x)
    V = np.trapezoid(pdf * (info - C) ** 2, x)
    arg = (n * C - k + 0.5 * math.log2(n)) / math.sqrt(n * V)
    return 0.5 * math.erfc(arg / math.sqrt(2.0))


def crc_long_division(bits, poly: int):
    """Remainder of ``bits(x) * x^r`` divided by ``poly``; first bit is the highest degree."""
    r = poly.bit_length() - 1
    val = 0
    for b in bits:
        val = (val << 1) | int(b)
    val <<= r
    while val.bit_length() > r:
        val ^= poly << (val.bit_length() - 1 - r)
    return [(val >> (r - 1 - i)) & 1 for i in range(r)]


def distinct_partitions(w: int, n: int):
    """All sets of distinct integers in 1..n summing to w."""
    out = []
    for size in range(0, w + 1):
        for combo in itertools.combinations(range(1, n + 1), size):
            if sum(combo) == w:
                out.append(combo)
    return out


def polar_transform_recursive(u):
    u = list(u)
    if len(u) == 1:
        return u
    h = len(u) // 2
    a = polar_transform_recursive(u[:h])
    b = polar_transform_recursive(u[h:])
    return [x ^ y for x, y in zip(a, b)] + b


def ml_bler_monte_carlo(G, esn0_db: float, trials: int, seed: int) -> tuple[float, float]:
    """Brute-force ML BLER and its standard error, from scratch with plain numpy.

    BPSK per real dimension with amplitude sqrt(1/2) and noise variance N0/2;
    ML picks the codeword of largest correlation with the received vector.
    """
    words = all_codewords(G).astype(float)
    signs = 1.0 - 2.0 * words
    rng = np.random.default_rng(seed)
    n0 = 10.0 ** (-esn0_db / 10.0)
    errors = 0
    done = 0
    while done < trials:
        b = min(100000, trials - done)
        idx = rng.integers(0, words.shape[0], b)
        y = math.sqrt(0.5) * signs[idx] + rng.normal(0.0, math.sqrt(n0 / 2.0), (b, words.shape[1]))
        errors += int(np.count_nonzero(np.argmax(y @ signs.T, axis=1) != idx))
        done += b
    p = errors / trials
    return p, math.sqrt(p * (1 - p) / trials)

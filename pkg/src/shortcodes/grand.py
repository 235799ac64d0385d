"""Ordered-reliability GRAND: guess noise patterns in ascending logistic weight.

A noise pattern is a set of 1-based reliability ranks (rank 1 is the least
reliable position); its logistic weight is the sum of those ranks. The
patterns of weight ``w`` are the partitions of ``w`` into distinct parts, so
the schedule is generated lazily, one partition at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numba
import numpy as np

from .codes.core import Code
from .errors import ConfigInvalid
from .gf2 import pack_rows
from .result import DecodeResult, OpCounters, Status

DEFAULT_MAX_QUERIES = 10**9
EXACT_MAX_N = 20


@dataclass(frozen=True)
class GrandConfig:
    """``ordering`` is ``"logistic"`` (the decoder proper) or ``"exact"``.

    The exact ordering queries patterns by their true likelihood and is only
    available for ``n <= 20``; it turns GRAND into an ML decoder and serves as
    a reference.
    """

    max_queries: int = DEFAULT_MAX_QUERIES
    ordering: str = "logistic"

    def __post_init__(self):
        if self.max_queries < 1:
            raise ConfigInvalid("max_queries must be >= 1")
        if self.ordering not in ("logistic", "exact"):
            raise ConfigInvalid(f"unknown ordering {self.ordering!r}")


@dataclass(frozen=True)
class BscParams:
    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 0.5:
            raise ValueError("crossover probability must lie in (0, 1/2)")


def logistic_weight(support) -> int:
    return int(sum(support))


@numba.njit(cache=True)
def _fill(parts, start, remainder, cap):
    """Greedily write distinct parts ``< cap`` summing to ``remainder``; returns the new length or -1."""
    m = start
    while remainder > 0:
        x = min(cap - 1, remainder)
        if x < 1:
            return -1
        parts[m] = x
        m += 1
        remainder -= x
        cap = x
    return m


@numba.njit(cache=True)
def _next_partition(parts, m):
    """Next partition of the same total in reverse-lexicographic order (parts descending).

    Returns the new part count, or -1 when the weight class is exhausted.
    """
    tail = 0
    for j in range(m - 1, -1, -1):
        tail += parts[j]
        v = parts[j] - 1
        r = tail - v
        if v >= 1 and r <= v * (v - 1) // 2:
            parts[j] = v
            return _fill(parts, j + 1, r, v)
    return -1


@numba.njit(cache=True)
def _first_partition(parts, w, n):
    """Lexicographically largest partition of ``w`` into distinct parts ``<= n``."""
    if w > n * (n + 1) // 2:
        return -1
    return _fill(parts, 0, w, n + 1)


@dataclass
class QuerySchedule:
    """Lazily generated noise supports, ascending in logistic weight.

    Within a weight class the partitions come in reverse-lexicographic order
    (largest part first), e.g. weight 6 gives {6}, {5,1}, {4,2}, {3,2,1}.
    """

    n: int
    max_queries: int = DEFAULT_MAX_QUERIES

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        parts = np.zeros(max(self.n, 1), dtype=np.int64)
        emitted = 0
        w = 0
        while emitted < self.max_queries:
            m = _first_partition(parts, w, self.n)
            if m < 0:
                return
            while m >= 0 and emitted < self.max_queries:
                yield tuple(int(x) for x in parts[:m][::-1])
                emitted += 1
                m = _next_partition(parts, m) if m else -1
            w += 1

    def take(self, count: int) -> list[tuple[int, ...]]:
        out = []
        for s in self:
            if len(out) >= count:
                break
            out.append(s)
        return out


def build_schedule(n: int, max_queries: int = DEFAULT_MAX_QUERIES) -> QuerySchedule:
    return QuerySchedule(n, max_queries)


@numba.njit(cache=True)
def _grand_search(s0, cols, npar, max_queries, op_cap):
    """Walk the logistic schedule until the syndrome vanishes.

    ``cols[r]`` is the packed syndrome column of the rank-``r+1`` position.
    Returns ``(queries, found, support, m, adds, comps)``.
    """
    n = cols.shape[0]
    W = s0.shape[0]
    parts = np.zeros(max(n, 1), np.int64)
    s = np.empty(W, np.uint64)
    queries = 0
    adds = 0
    comps = 0
    w = 0
    while True:
        m = _first_partition(parts, w, n)
        if m < 0:
            return queries, False, parts, 0, adds, comps
        while m >= 0:
            if queries >= max_queries or (op_cap > 0 and adds + comps >= op_cap):
                return queries, False, parts, 0, adds, comps
            for x in range(W):
                s[x] = s0[x]
            for i in range(m):
                r = parts[i] - 1
                for x in range(W):
                    s[x] ^= cols[r, x]
            queries += 1
            adds += m * npar
            comps += 1
            zero = True
            for x in range(W):
                if s[x] != 0:
                    zero = False
                    break
            if zero:
                return queries, True, parts, m, adds, comps
            m = _next_partition(parts, m) if m > 0 else -1
        w += 1


_EXACT_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _pattern_syndromes(code: Code) -> np.ndarray:
    """Syndrome (as an integer) of every error pattern ``e`` in ``0..2^n-1``."""
    key = id(code)
    hit = _EXACT_CACHE.get(key)
    if hit is not None and hit[0] is code.H:
        return hit[1]
    H = code.H.to_array().astype(np.int64)
    colval = (H << np.arange(H.shape[0])[:, None]).sum(axis=0)
    syn = np.zeros(1 << code.n, dtype=np.int64)
    for i in range(code.n):
        syn[1 << i : 2 << i] = syn[: 1 << i] ^ colval[i]
    _EXACT_CACHE[key] = (code.H, syn)
    return syn


def _exact_grand(code: Code, llr: np.ndarray, hard: np.ndarray, max_queries: int) -> DecodeResult:
    n, k = code.n, code.k
    mag = np.abs(llr)
    syn = _pattern_syndromes(code)
    cost = np.zeros(1 << n)
    for i in range(n):
        cost[1 << i : 2 << i] = cost[: 1 << i] + mag[i]
    s0 = int(syn[int((hard.astype(np.int64) << np.arange(n)).sum())])
    coset = np.flatnonzero(syn == s0)
    e = int(coset[np.argmin(cost[coset])])
    queries = int(np.count_nonzero(cost < cost[e])) + 1
    ops = np.array([queries * (n - k), 0, queries], dtype=np.int64)
    if queries > max_queries:
        return DecodeResult(hard, code.info_from_codeword(hard), Status.ABANDONED, math.inf,
                            OpCounters.from_array(ops), max_queries, found=False)
    cw = hard ^ ((e >> np.arange(n)) & 1).astype(np.uint8)
    return DecodeResult(cw, code.info_from_codeword(cw), Status.OK, float(cost[e]),
                        OpCounters.from_array(ops), queries)


def grand_decode(code: Code, llr, config: GrandConfig = GrandConfig(), op_cap: int = 0) -> DecodeResult:
    """Return the first queried word with zero syndrome, or ABANDONED at the query cap."""
    llr = np.asarray(llr, dtype=float)
    n = code.n
    hard = (llr < 0).astype(np.uint8)
    if code.H is None:
        return DecodeResult(hard, hard.copy(), Status.OK, 0.0, OpCounters(), 1)
    if config.ordering == "exact":
        if n > EXACT_MAX_N:
            raise ConfigInvalid(f"exact ordering needs n <= {EXACT_MAX_N}")
        return _exact_grand(code, llr, hard, config.max_queries)
    mag = np.abs(llr)
    rank_pos = np.argsort(mag, kind="stable")  # rank 1 = least reliable
    Hc = code.H.to_array()
    cols = pack_rows(Hc.T[rank_pos])
    s0 = pack_rows(((Hc.astype(np.int64) @ hard) & 1)[None, :].astype(np.uint8))[0]
    sort_comps = int(math.ceil(n * math.log2(max(n, 2))))
    setup = n * (n - code.k) + sort_comps
    # the cap covers the setup too, so the search gets what is left of it
    search_cap = max(int(op_cap) - setup, 1) if op_cap > 0 else 0
    queries, found, parts, m, adds, comps = _grand_search(s0, cols, n - code.k, int(config.max_queries), search_cap)
    ops = OpCounters(int(adds) + n * (n - code.k), 0, int(comps) + sort_comps)
    if not found:
        return DecodeResult(hard, code.info_from_codeword(hard), Status.ABANDONED, math.inf, ops,
                            int(queries), found=False)
    cw = hard.copy()
    flips = rank_pos[parts[:m] - 1]
    cw[flips] ^= 1
    return DecodeResult(cw, code.info_from_codeword(cw), Status.OK, float(mag[flips].sum()), ops, int(queries))


def renyi_half(p: float) -> float:
    """Binary Rényi entropy of order 1/2, in bits."""
    return 2.0 * math.log2(math.sqrt(p) + math.sqrt(1.0 - p))


def query_bound(n: int, k: int, p: float | BscParams) -> float:
    """Typical query count ``2^(n * min(H_1/2(p), 1 - k/n))`` on a BSC."""
    p = p.p if isinstance(p, BscParams) else float(p)
    if not 0.0 < p <= 0.5:
        raise ValueError("crossover probability must lie in (0, 1/2]")
    return 2.0 ** (n * min(renyi_half(p), 1.0 - k / n))

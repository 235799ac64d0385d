"""Ordered-statistics decoding with an optional probability-based early stop.

Positions are sorted by reliability, the most reliable independent positions
(MRIPs) are found by Gaussian elimination, and test error patterns (TEPs) on
the MRIPs are re-encoded in ascending Hamming weight. Candidates are scored
by correlation discrepancy, which ranks codewords exactly like likelihood.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numba
import numpy as np

from .codes.core import Code
from .errors import ConfigInvalid, RankDeficient
from .gf2 import permute_packed, rref_packed
from .result import DecodeResult, OpCounters, Status


_NO_H = np.zeros((1, 1), np.uint64)


class Variant(str, Enum):
    ORIGINAL = "ORIGINAL"
    PB = "PB"


@dataclass(frozen=True)
class OsdConfig:
    """Decoder knobs.

    Attributes:
        order: Largest TEP weight; ``None`` means ``order_for_ml(code.dH)``.
        variant: ``ORIGINAL`` enumerates every TEP up to ``order``;
            ``PB`` also stops once the chance that a remaining weight class
            beats the best candidate drops below ``pb_threshold``.
        pb_threshold: Stopping threshold of the PB variant; 0 disables it.
        prune: Skip TEPs that provably cannot beat the best candidate. The
            decoded word is unchanged; only the work drops. Always on for PB.
    """

    order: int | None = None
    variant: Variant = Variant.ORIGINAL
    pb_threshold: float = 1e-5
    prune: bool = False

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.order is not None and self.order < 0:
            raise ConfigInvalid("order must be >= 0")
        if not 0.0 <= self.pb_threshold <= 1.0:
            raise ConfigInvalid("pb_threshold must lie in [0, 1]")


@dataclass(frozen=True)
class Tep:
    support: tuple[int, ...]

    @property
    def weight(self) -> int:
        return len(self.support)


def order_for_ml(dH: int) -> int:
    """ceil(dH/4 - 1), floored at 0."""
    if dH < 1:
        raise ValueError("dH must be >= 1")
    return max(0, -(-dH // 4) - 1)


def soft_distance(candidate, hard, llr) -> float:
    """Sum of |llr| where ``candidate`` disagrees with the hard decision."""
    candidate = np.asarray(candidate, dtype=np.uint8)
    hard = np.asarray(hard, dtype=np.uint8)
    return float(np.abs(np.asarray(llr, dtype=float))[candidate != hard].sum())


def pb_skip_rule(best_score: float, next_tep_weight: int, llr_sorted, pb_threshold: float,
                 order: int | None = None) -> bool:
    """Whether to keep enumerating at the start of weight class ``next_tep_weight``.

    ``llr_sorted`` holds the MRIP LLRs, most reliable first. Each MRIP is wrong
    with probability ``1/(1+e^|llr|)``; the number of wrong MRIPs is
    Poisson-binomial. Only weight classes whose cheapest TEP could still beat
    ``best_score`` count, and enumeration stops when their total probability
    falls below ``pb_threshold``.
    """
    mag = np.sort(np.abs(np.asarray(llr_sorted, dtype=float)))
    k = mag.size
    order = k if order is None else order
    p = 1.0 / (1.0 + np.exp(mag))
    pmf = _poisson_binomial(p, order)
    prefix = np.concatenate([[0.0], np.cumsum(mag)])
    mass = sum(pmf[w] for w in range(next_tep_weight, order + 1) if prefix[w] < best_score)
    return not mass < pb_threshold


@numba.njit(cache=True)
def _poisson_binomial(p, top):
    pmf = np.zeros(top + 1)
    pmf[0] = 1.0
    for i in range(p.size):
        for w in range(top, 0, -1):
            pmf[w] = pmf[w] * (1.0 - p[i]) + pmf[w - 1] * p[i]
        pmf[0] *= 1.0 - p[i]
    return pmf


@numba.njit(cache=True)
def _next_colex(comb, w, k):
    """Advance ``comb[:w]`` to the next ``w``-subset of ``range(k)`` in colex order."""
    for j in range(w):
        limit = comb[j + 1] if j + 1 < w else k
        if comb[j] + 1 < limit:
            comb[j] += 1
            for i in range(j):
                comb[i] = i
            return True
    return False


def tep_supports(k: int, order: int) -> Iterator[Tep]:
    """TEPs in decoding order; support indices count MRIPs from most reliable (0).

    Weight classes ascend; within a class, supports run in colex order over
    the reliability-reversed indices, so the least reliable MRIPs flip first.
    """
    for w in range(min(order, k) + 1):
        comb = np.arange(max(w, 1), dtype=np.int64)
        while True:
            yield Tep(tuple(sorted(k - 1 - int(r) for r in comb[:w])))
            if w == 0 or not _next_colex(comb, w, k):
                break


@numba.njit(cache=True)
def _byte_cost(word_bytes, table):
    s = 0.0
    for b in range(table.shape[0]):
        s += table[b, word_bytes[b]]
    return s


@numba.njit(cache=True)
def _tep_search(lm, P, d0, table, lall, is_par, par_bit, order, prune, pb, pb_threshold, dH, pflip, best0,
                op_budget):
    """Enumerate TEPs; MRIP index 0 is the least reliable.

    Returns ``(best_support, best_w, best_cost, evaluated, adds, mults, comps, capped)``.
    """
    k = lm.shape[0]
    Wp = d0.shape[0]
    npar = lall.shape[0] - k
    prefix = np.zeros(k + 1)
    for i in range(k):
        prefix[i + 1] = prefix[i] + lm[i]
    best = best0
    best_sup = np.zeros(max(order, 1), np.int64)
    best_w = 0
    best_word = d0.copy()
    evaluated = 1
    adds = 0
    mults = 0
    comps = 0
    word = np.empty(Wp, np.uint64)
    comb = np.zeros(max(order, 1), np.int64)
    pmf = np.zeros(1)
    have_pmf = False
    stop = False
    # optimality check after each improvement needs ``dH`` and the ascending |llr| order
    if dH > 0 and prune:
        stop = _ml_certified(best, best_sup, 0, best_word, lall, is_par, par_bit, k, dH)
        adds += dH
    for w in range(1, order + 1):
        if stop:
            break
        if prune:
            comps += 1
            if prefix[w] >= best:
                break
        if pb and pb_threshold > 0.0:
            if not have_pmf:
                pmf = _poisson_binomial(pflip, order)
                have_pmf = True
                mults += 2 * k * (order + 1)
                adds += k * (order + 1)
            mass = 0.0
            for ww in range(w, order + 1):
                comps += 1
                if prefix[ww] < best:
                    mass += pmf[ww]
                    adds += 1
            comps += 1
            if mass < pb_threshold:
                break
        for i in range(w):
            comb[i] = i
        while True:
            if op_budget > 0 and adds + mults + comps >= op_budget:
                return best_sup, best_w, best, evaluated, adds, mults, comps, True
            mcost = 0.0
            for i in range(w):
                mcost += lm[comb[i]]
            adds += w
            comps += 1
            if mcost < best or not prune:
                for x in range(Wp):
                    word[x] = d0[x]
                for i in range(w):
                    r = comb[i]
                    for x in range(Wp):
                        word[x] ^= P[r, x]
                cost = mcost + _byte_cost(word.view(np.uint8), table)
                evaluated += 1
                adds += w * npar + npar
                comps += 1
                if cost < best:
                    best = cost
                    best_w = w
                    for i in range(w):
                        best_sup[i] = comb[i]
                    for x in range(Wp):
                        best_word[x] = word[x]
                    if dH > 0 and prune:
                        adds += dH
                        if _ml_certified(best, best_sup, best_w, best_word, lall, is_par, par_bit, k, dH):
                            stop = True
                            break
            elif prune:
                # colex keeps the largest index non-decreasing, so nothing later in this class is cheaper
                comps += 1
                if prefix[w - 1] + lm[comb[w - 1]] >= best:
                    break
            if not _next_colex(comb, w, k):
                break
    return best_sup, best_w, best, evaluated, adds, mults, comps, False


@numba.njit(cache=True)
def _ml_certified(best, sup, w, word, lall, is_par, par_bit, k, dH):
    """True when no codeword can have a smaller discrepancy than ``best``.

    Any other codeword differs from the best one in at least ``dH`` positions,
    of which at most ``|D|`` lie in the best candidate's disagreement set ``D``.
    ``lall`` lists every position in ascending |llr| as (value, MRIP or parity id).
    """
    n = lall.shape[0]
    dsize = w
    for x in range(word.shape[0]):
        dsize += _popcount(word[x])
    need = dH - dsize
    if need <= 0:
        return False
    total = 0.0
    for j in range(n):
        idx = par_bit[j]
        if is_par[j]:
            if (word[idx >> 6] >> np.uint64(idx & 63)) & np.uint64(1):
                continue
        else:
            hit = False
            for i in range(w):
                if sup[i] == idx:
                    hit = True
            if hit:
                continue
        total += lall[j]
        need -= 1
        if need == 0:
            break
    return need == 0 and best <= total


@numba.njit(cache=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - np.uint64(1)
        c += 1
    return c


@dataclass(frozen=True)
class _Reduced:
    mrip: np.ndarray  # code positions, most reliable first
    parity: np.ndarray  # code positions of parity bits, in bit order of ``P``
    P: np.ndarray  # (k, words) packed parity contribution of each MRIP
    row_xors: int
    scans: int


@numba.njit(cache=True)
def _reduce_kernel(Gd, Hd, use_h, n, k, priority):
    """Elimination core of ``reduce_for_osd``; also returns the rank found."""
    npar = n - k
    P = np.zeros((k, max((npar + 63) >> 6, 1)), np.uint64)
    mrip = np.zeros(k, np.int64)
    parity = np.zeros(npar, np.int64)
    is_piv = np.zeros(n, np.bool_)
    if use_h:
        rev = priority[::-1].copy()
        work = permute_packed(Hd, n, rev)
        pivots, _, xors, scans = rref_packed(work, n)
        for p in pivots:
            is_piv[p] = True
        c = 0
        for j in range(n - 1, -1, -1):
            if is_piv[j] or c == k:
                continue
            mrip[c] = rev[j]
            w = j >> 6
            b = np.uint64(j & 63)
            for r in range(pivots.size):
                if (work[r, w] >> b) & np.uint64(1):
                    P[c, r >> 6] |= np.uint64(1) << np.uint64(r & 63)
            c += 1
        for r in range(min(pivots.size, npar)):
            parity[r] = rev[pivots[r]]
        return mrip, parity, P, xors, scans, n - pivots.size
    work = permute_packed(Gd, n, priority)
    pivots, _, xors, scans = rref_packed(work, n)
    for p in pivots:
        is_piv[p] = True
    for r in range(pivots.size):
        mrip[r] = priority[pivots[r]]
    c = 0
    for j in range(n):
        if is_piv[j] or c == npar:
            continue
        parity[c] = priority[j]
        w = j >> 6
        b = np.uint64(j & 63)
        for r in range(pivots.size):
            if (work[r, w] >> b) & np.uint64(1):
                P[r, c >> 6] |= np.uint64(1) << np.uint64(c & 63)
        c += 1
    return mrip, parity, P, xors, scans, pivots.size


def reduce_for_osd(code: Code, priority: np.ndarray) -> _Reduced:
    """Find the MRIPs for a most-reliable-first ``priority`` and their parity columns.

    Elimination runs on ``G`` or, when ``n - k < k``, on ``H`` from the least
    reliable end; both yield the same MRIP set because a basis's complement is
    a basis of the dual matroid.
    """
    n, k = code.n, code.k
    use_h = code.H is not None and n - k < k
    Hd = code.H.data if use_h else _NO_H
    mrip, parity, P, xors, scans, rk = _reduce_kernel(code.G.data, Hd, use_h, n, k,
                                                       np.asarray(priority, dtype=np.int64))
    if rk < k:
        raise RankDeficient(f"rank {rk} < k={k}")
    return _Reduced(mrip, parity, P, int(xors), int(scans))


@numba.njit(cache=True)
def _osd_kernel(Gd, Hd, use_h, n, k, llr, order, prune, pb, pb_threshold, dH, op_cap, sort_comps):
    """Full OSD pass; returns ``(cw, best, evaluated, counters, capped, rank)``."""
    mag = np.abs(llr)
    hard = np.zeros(n, np.uint8)
    for i in range(n):
        if llr[i] < 0:
            hard[i] = 1
    counters = np.zeros(3, np.int64)
    counters[2] += sort_comps
    priority = np.argsort(-mag, kind="mergesort")
    mrip, parity, P0, xors, scans, rk = _reduce_kernel(Gd, Hd, use_h, n, k, priority)
    if rk < k:
        return hard, 0.0, 0, counters, False, rk
    counters[0] += xors * n + k * (n - k)
    counters[2] += scans
    npar = n - k
    Wp = P0.shape[1]

    # reverse the MRIPs so index 0 is the least reliable, matching the colex enumeration
    mrip_rev = mrip[::-1].copy()
    P = P0[::-1].copy()
    lm = np.empty(k)
    for i in range(k):
        lm[i] = mag[mrip_rev[i]]
    d0 = np.zeros(Wp, np.uint64)
    for c in range(npar):
        if hard[parity[c]]:
            d0[c >> 6] ^= np.uint64(1) << np.uint64(c & 63)
    for i in range(k):
        if hard[mrip_rev[i]]:
            for x in range(Wp):
                d0[x] ^= P[i, x]

    # table[b, v]: summed parity |llr| over the set bits of byte value v at byte b
    table = np.zeros((Wp * 8, 256))
    for c in range(npar):
        b = c >> 3
        bit = 1 << (c & 7)
        for v in range(256):
            if v & bit:
                table[b, v] += mag[parity[c]]
    best0 = _byte_cost(d0.view(np.uint8), table)

    lall_raw = np.empty(n)
    lall_raw[:k] = lm
    for c in range(npar):
        lall_raw[k + c] = mag[parity[c]]
    asc = np.argsort(lall_raw, kind="mergesort")
    lall = lall_raw[asc]
    is_par = asc >= k
    par_bit = np.where(is_par, asc - k, asc)
    pflip = 1.0 / (1.0 + np.exp(lm))
    budget = 0
    if op_cap > 0:
        budget = max(1, op_cap - counters.sum())
    sup, w, best, evaluated, adds, mults, comps, capped = _tep_search(
        lm, P, d0, table, lall, is_par, par_bit, order, prune, pb, pb_threshold, dH, pflip, best0, budget)
    counters[0] += adds
    counters[1] += mults
    counters[2] += comps

    cw = hard.copy()
    word = d0.copy()
    for i in range(w):
        cw[mrip_rev[sup[i]]] ^= 1
        for x in range(Wp):
            word[x] ^= P[sup[i], x]
    for c in range(npar):
        cw[parity[c]] = hard[parity[c]] ^ np.uint8((word[c >> 6] >> np.uint64(c & 63)) & np.uint64(1))
    return cw, best, evaluated, counters, capped, rk


def osd_decode(code: Code, llr, config: OsdConfig = OsdConfig(), op_cap: int = 0) -> DecodeResult:
    """Order-m OSD.

    With ``op_cap`` set, enumeration halts once the running operation total
    reaches it and the best candidate so far is returned as ABANDONED.

    Raises:
        ConfigInvalid: if neither ``config.order`` nor ``code.dH`` is set.
        RankDeficient: if ``code.G`` is not of full rank.
    """
    llr = np.asarray(llr, dtype=float)
    n, k = code.n, code.k
    order = config.order
    if order is None:
        if code.dH is None:
            raise ConfigInvalid("OSD order must be given when dH is unknown")
        order = order_for_ml(code.dH)
    order = min(order, k)
    sort_comps = int(math.ceil(n * math.log2(max(n, 2))))
    if code.H is None:
        hard = (llr < 0).astype(np.uint8)
        return DecodeResult(hard, hard.copy(), Status.OK, 0.0, OpCounters(0, 0, sort_comps), 1)
    pb = config.variant is Variant.PB
    prune = config.prune or pb
    dH = int(code.dH) if (prune and code.dH) else 0
    use_h = n - k < k
    Hd = code.H.data if use_h else _NO_H
    cw, best, evaluated, counters, capped, rk = _osd_kernel(
        code.G.data, Hd, use_h, n, k, llr, order, prune, pb, float(config.pb_threshold), dH, int(op_cap),
        sort_comps)
    if rk < k:
        raise RankDeficient(f"rank {rk} < k={k}")
    status = Status.ABANDONED if capped else Status.OK
    return DecodeResult(cw, code.info_from_codeword(cw), status, float(best),
                        OpCounters.from_array(counters), int(evaluated))

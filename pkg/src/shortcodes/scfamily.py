"""Successive-cancellation family on the polar tree: SC, SCL, SCS and SQ.

Every code enters through a :class:`PolarDescriptor`: inputs ``u`` of the
length-``n`` polar transform are information bits or (possibly dynamic)
frozen bits, and code positions are a subset of transform outputs. Paths
carry an exact log-likelihood penalty, so with enough width each search is
an ML decoder.

Operation counting: one exact check-node update ``f`` costs 4 additions,
4 multiplications (exp/log evaluations included) and 2 comparisons; a
variable-node update ``g`` costs 1 addition; a path-metric update costs
2 additions and 2 multiplications. ``work`` counts LLR node updates.
Priority-store operations are charged at binary-heap cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numba
import numpy as np

from .codes.bch import ebch_polar_positions
from .codes.core import Code, Family
from .codes.polar import PolarDescriptor, is_pow2, linear_descriptor
from .errors import ConfigInvalid, UnsupportedParams
from .result import DecodeResult, OpCounters, Status

__all__ = [
    "Mode", "PolarDescriptor", "SearchConfig", "descriptor_for", "ebch_descriptor",
    "path_metric_update", "sc_decode", "scl_decode", "scs_decode", "search_decode", "sq_decode",
]

F_ADDS, F_MULTS, F_COMPS = 4, 4, 2
PEN_ADDS, PEN_MULTS = 2, 2


class Mode(str, Enum):
    SC = "SC"
    SCL = "SCL"
    SCS = "SCS"
    SQ = "SQ"


@dataclass(frozen=True)
class SearchConfig:
    """``stack_cap`` defaults to ``16 * L``; ``bias=None`` picks the SQ default per decode."""

    mode: Mode = Mode.SCL
    L: int = 8
    stack_cap: int | None = None
    bias: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.L < 1:
            raise ConfigInvalid("L must be >= 1")
        if self.stack_cap is not None and self.stack_cap < self.L:
            raise ConfigInvalid("stack_cap must be >= L")

    @property
    def cap(self) -> int:
        return 16 * self.L if self.stack_cap is None else self.stack_cap


def path_metric_update(metric: float, llr_value: float, decided_bit: int) -> float:
    """Add the penalty ``ln(1 + exp(-(1 - 2b) * llr))``."""
    return metric + float(np.logaddexp(0.0, -(1 - 2 * int(decided_bit)) * llr_value))


def ebch_descriptor(code: Code) -> PolarDescriptor:
    """Dynamic-frozen description of an eBCH code.

    Codeword position ``j`` goes to the transform index given by the integer
    form of ``alpha**j`` (the parity bit to index 0), which lines the cyclic
    structure up with the polar kernel.
    """
    if not is_pow2(code.n):
        raise UnsupportedParams(f"eBCH descriptor needs a power-of-two length, got {code.n}")
    return linear_descriptor(code, ebch_polar_positions(code.n))


def descriptor_for(code: Code) -> PolarDescriptor:
    """The code's native descriptor, or a dynamic-frozen one built from ``H``."""
    if code.descriptor is not None:
        return code.descriptor
    if code.family is Family.EBCH and is_pow2(code.n):
        code.descriptor = ebch_descriptor(code)
    else:
        code.descriptor = linear_descriptor(code)
    return code.descriptor


# ---------------------------------------------------------------- kernels


@numba.njit(cache=True, inline="always")
def _f(a, b):
    s = min(abs(a), abs(b))
    if (a < 0) != (b < 0):
        s = -s
    return s + math.log1p(math.exp(-abs(a + b))) - math.log1p(math.exp(-abs(a - b)))


@numba.njit(cache=True, inline="always")
def _penalty(lam, b):
    x = -lam if b == 0 else lam
    # numerically stable softplus
    if x > 0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


@numba.njit(cache=True)
def _ctz(i):
    t = 0
    while (i >> t) & 1 == 0:
        t += 1
    return t


@numba.njit(cache=True)
def _advance(alpha, beta, i, m, ops):
    """Fill ``alpha[1]`` with the decision LLR of input ``i``.

    Tallies ops into ``ops`` and returns the number of node updates.
    """
    if i == 0:
        top = m
        updates = 0
    else:
        t = _ctz(i)
        h = 1 << t
        base1 = 2 * h
        for j in range(h):
            a = alpha[base1 + j]
            b = alpha[base1 + h + j]
            alpha[h + j] = b - a if beta[h + j] else b + a
        ops[0] += h
        top = t
        updates = h
    for s in range(top - 1, -1, -1):
        h = 1 << s
        base1 = 2 * h
        for j in range(h):
            alpha[h + j] = _f(alpha[base1 + j], alpha[base1 + h + j])
        ops[0] += F_ADDS * h
        ops[1] += F_MULTS * h
        ops[2] += F_COMPS * h
        updates += h
    return updates


@numba.njit(cache=True)
def _commit(beta, u, i, b, m, cur, x):
    """Record ``u_i = b`` and propagate partial sums; fills ``x`` after the last input."""
    u[i] = b
    cur[0] = b
    size = 1
    s = 0
    while s < m and (i >> s) & 1:
        for j in range(size):
            cur[size + j] = cur[j]
            cur[j] ^= beta[size + j]
        s += 1
        size *= 2
    if s < m:
        for j in range(size):
            beta[size + j] = cur[j]
    else:
        for j in range(size):
            x[j] = cur[j]


@numba.njit(cache=True)
def _frozen_value(u, i, mptr, midx):
    b = 0
    for q in range(mptr[i], mptr[i + 1]):
        b ^= u[midx[q]]
    return b


@numba.njit(cache=True)
def _passes(x, positions, check):
    for r in range(check.shape[0]):
        s = 0
        for c in range(check.shape[1]):
            if check[r, c]:
                s ^= x[positions[c]]
        if s:
            return False
    return True


@numba.njit(cache=True)
def _sc_kernel(llr_t, m, is_frozen, mptr, midx):
    n = 1 << m
    alpha = np.zeros(2 * n)
    beta = np.zeros(2 * n, np.uint8)
    u = np.zeros(n, np.uint8)
    x = np.zeros(n, np.uint8)
    cur = np.zeros(n, np.uint8)
    alpha[n:] = llr_t
    ops = np.zeros(3, np.int64)
    metric = 0.0
    work = 0
    for i in range(n):
        work += _advance(alpha, beta, i, m, ops)
        lam = alpha[1]
        if is_frozen[i]:
            b = _frozen_value(u, i, mptr, midx)
        else:
            b = 1 if lam < 0 else 0
            ops[2] += 1
        metric += _penalty(lam, b)
        ops[0] += PEN_ADDS
        ops[1] += PEN_MULTS
        _commit(beta, u, i, b, m, cur, x)
    return u, x, metric, ops, work


@numba.njit(cache=True)
def _heap_cost(size):
    c = 1
    while (1 << c) <= size:
        c += 1
    return c


@numba.njit(cache=True)
def _scl_kernel(llr_t, m, is_frozen, mptr, midx, L, positions, check, op_cap):
    n = 1 << m
    alpha = np.zeros((L, 2 * n))
    beta = np.zeros((L, 2 * n), np.uint8)
    u = np.zeros((L, n), np.uint8)
    xs = np.zeros((L, n), np.uint8)
    alpha2 = np.zeros((L, 2 * n))
    beta2 = np.zeros((L, 2 * n), np.uint8)
    u2 = np.zeros((L, n), np.uint8)
    metric = np.zeros(L)
    metric2 = np.zeros(L)
    cur = np.zeros(n, np.uint8)
    lam = np.zeros(L)
    cand = np.zeros(2 * L)
    alpha[0, n:] = llr_t
    cnt = 1
    ops = np.zeros(3, np.int64)
    work = 0
    capped = False
    for i in range(n):
        for p in range(cnt):
            work += _advance(alpha[p], beta[p], i, m, ops)
            lam[p] = alpha[p, 1]
        if is_frozen[i]:
            for p in range(cnt):
                b = _frozen_value(u[p], i, mptr, midx)
                metric[p] += _penalty(lam[p], b)
                _commit(beta[p], u[p], i, b, m, cur, xs[p])
            ops[0] += PEN_ADDS * cnt
            ops[1] += PEN_MULTS * cnt
        else:
            for p in range(cnt):
                cand[2 * p] = metric[p] + _penalty(lam[p], 0)
                cand[2 * p + 1] = metric[p] + _penalty(lam[p], 1)
            ops[0] += 2 * PEN_ADDS * cnt
            ops[1] += 2 * PEN_MULTS * cnt
            total = 2 * cnt
            if total <= L:
                keep = np.arange(total)
            else:
                order = np.argsort(cand[:total], kind="mergesort")
                keep = np.sort(order[:L])
                ops[2] += total * _heap_cost(total)
            for q in range(keep.size):
                p = keep[q] >> 1
                b = keep[q] & 1
                alpha2[q] = alpha[p]
                beta2[q] = beta[p]
                u2[q] = u[p]
                metric2[q] = cand[keep[q]]
            cnt = keep.size
            for q in range(cnt):
                alpha[q] = alpha2[q]
                beta[q] = beta2[q]
                u[q] = u2[q]
                metric[q] = metric2[q]
                _commit(beta[q], u[q], i, keep[q] & 1, m, cur, xs[q])
        if op_cap > 0 and ops[0] + ops[1] + ops[2] >= op_cap and i < n - 1:
            capped = True
            break
    best = -1
    if not capped:
        for p in range(cnt):
            ops[2] += 1
            if best < 0 or metric[p] < metric[best]:
                if check.shape[0] == 0 or _passes(xs[p], positions, check):
                    best = p
            if check.shape[0] > 0:
                ops[0] += check.shape[0] * check.shape[1]
    found = best >= 0
    if not found:
        best = 0
        for p in range(cnt):
            if metric[p] < metric[best]:
                best = p
    return u[best].copy(), xs[best].copy(), metric[best], found, capped, ops, work


@numba.njit(cache=True)
def _stack_kernel(llr_t, m, is_frozen, mptr, midx, L, cap, bias, positions, check, op_cap):
    """Best-first search over the polar tree.

    Stored paths always sit at an information bit (or are complete): frozen
    inputs are decided inline right after each branching.
    """
    n = 1 << m
    C = cap + 1
    alpha = np.zeros((C, 2 * n))
    beta = np.zeros((C, 2 * n), np.uint8)
    u = np.zeros((C, n), np.uint8)
    xs = np.zeros((C, n), np.uint8)
    metric = np.zeros(C)
    depth = np.zeros(C, np.int64)
    seq = np.zeros(C, np.int64)
    alive = np.zeros(C, np.bool_)
    visits = np.zeros(n + 1, np.int64)
    cur = np.zeros(n, np.uint8)
    ops = np.zeros(3, np.int64)
    work = 0
    counter = 0
    nalive = 0

    # root: decide leading frozen bits inline
    alpha[0, n:] = llr_t
    i = 0
    while i < n and is_frozen[i]:
        work += _advance(alpha[0], beta[0], i, m, ops)
        b = _frozen_value(u[0], i, mptr, midx)
        metric[0] += _penalty(alpha[0, 1], b)
        ops[0] += PEN_ADDS
        ops[1] += PEN_MULTS
        _commit(beta[0], u[0], i, b, m, cur, xs[0])
        i += 1
    depth[0] = i
    alive[0] = True
    nalive = 1
    status = 1  # 0 ok, 1 emptied, 2 capped
    best = -1
    while nalive > 0:
        if op_cap > 0 and ops[0] + ops[1] + ops[2] >= op_cap:
            status = 2
            break
        # pop: lowest priority, earliest insertion on ties
        sel = -1
        bp = 0.0
        for s in range(C):
            if alive[s]:
                pr = metric[s] - bias * depth[s]
                if sel < 0 or pr < bp or (pr == bp and seq[s] < seq[sel]):
                    sel = s
                    bp = pr
        ops[2] += _heap_cost(nalive)
        alive[sel] = False
        nalive -= 1
        d = depth[sel]
        if d == n:
            ok = True
            if check.shape[0] > 0:
                ok = _passes(xs[sel], positions, check)
                ops[0] += check.shape[0] * check.shape[1]
            if ok:
                status = 0
                best = sel
                break
            continue
        visits[d] += 1
        if visits[d] > L:
            continue
        work += _advance(alpha[sel], beta[sel], d, m, ops)
        lam = alpha[sel, 1]
        # second child goes to a free slot
        other = -1
        for s in range(C):
            if not alive[s] and s != sel:
                other = s
                break
        alpha[other] = alpha[sel]
        beta[other] = beta[sel]
        u[other] = u[sel]
        base = metric[sel]
        for child in range(2):
            s = sel if child == 0 else other
            metric[s] = base + _penalty(lam, child)
            ops[0] += PEN_ADDS
            ops[1] += PEN_MULTS
            _commit(beta[s], u[s], d, child, m, cur, xs[s])
            j = d + 1
            while j < n and is_frozen[j]:
                work += _advance(alpha[s], beta[s], j, m, ops)
                b = _frozen_value(u[s], j, mptr, midx)
                metric[s] += _penalty(alpha[s, 1], b)
                ops[0] += PEN_ADDS
                ops[1] += PEN_MULTS
                _commit(beta[s], u[s], j, b, m, cur, xs[s])
                j += 1
            depth[s] = j
            seq[s] = counter
            counter += 1
            alive[s] = True
            nalive += 1
            ops[2] += _heap_cost(nalive)
        if nalive > cap:
            # evict the worst path, latest insertion on ties
            worst = -1
            wp = 0.0
            for s in range(C):
                if alive[s]:
                    pr = metric[s] - bias * depth[s]
                    if worst < 0 or pr > wp or (pr == wp and seq[s] > seq[worst]):
                        worst = s
                        wp = pr
            ops[2] += _heap_cost(nalive)
            alive[worst] = False
            nalive -= 1
    if best < 0:
        # report the best stored path (not a codeword of the outer code in general)
        best = 0
        bm = math.inf
        for s in range(C):
            if alive[s] and metric[s] < bm:
                best = s
                bm = metric[s]
        return u[best].copy(), xs[best].copy(), metric[best], status, ops, work
    return u[best].copy(), xs[best].copy(), metric[best], status, ops, work


# ---------------------------------------------------------------- public API


def _prep(desc: PolarDescriptor, llr):
    llr = np.asarray(llr, dtype=float)
    if llr.size != desc.code_length:
        raise ValueError(f"expected {desc.code_length} LLRs, got {llr.size}")
    n = desc.n
    m = n.bit_length() - 1
    mask = np.asarray(desc.frozen_masks, dtype=np.uint8)
    counts = mask.sum(axis=1)
    mptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    midx = np.nonzero(mask)[1].astype(np.int64)
    check = (np.zeros((0, desc.code_length), dtype=np.uint8) if desc.check is None
             else desc.check.to_array())
    return desc.embed_llr(llr), m, np.asarray(desc.is_frozen, dtype=np.bool_), mptr, midx, check


def _result(desc, u, x, metric, status, ops, work, found=True) -> DecodeResult:
    cw = np.asarray(x, dtype=np.uint8)[desc.positions]
    info = np.asarray(u, dtype=np.uint8)[desc.info_set]
    return DecodeResult(cw, info, status, float(metric), OpCounters.from_array(ops), int(work), found)


def sc_decode(desc: PolarDescriptor, llr) -> DecodeResult:
    """Single path; frozen bits follow their constraint, info bits the LLR sign.

    With a check matrix (CRC) a failing path is returned as ABANDONED, as SCL does.
    """
    llr_t, m, frz, mptr, midx, check = _prep(desc, llr)
    u, x, metric, ops, work = _sc_kernel(llr_t, m, frz, mptr, midx)
    found = True
    if check.shape[0] > 0:
        ops[0] += check.shape[0] * check.shape[1]
        found = bool(_passes(x, desc.positions, check))
    return _result(desc, u, x, metric, Status.OK if found else Status.ABANDONED, ops, work, found)


def scl_decode(desc: PolarDescriptor, llr, L: int, op_cap: int = 0) -> DecodeResult:
    """Keep the ``L`` best paths per input; with a check matrix, the best passing path wins."""
    if L < 1:
        raise ConfigInvalid("L must be >= 1")
    llr_t, m, frz, mptr, midx, check = _prep(desc, llr)
    u, x, metric, found, capped, ops, work = _scl_kernel(
        llr_t, m, frz, mptr, midx, int(L), desc.positions, check, int(op_cap))
    status = Status.OK if found and not capped else Status.ABANDONED
    return _result(desc, u, x, metric, status, ops, work, found=bool(found and not capped))


def mean_posterior_entropy(llr) -> float:
    """Average binary entropy (nats) of the per-bit posteriors, the expected penalty per decision."""
    a = np.abs(np.asarray(llr, dtype=float))
    p = 1.0 / (1.0 + np.exp(a))
    return float(np.mean(np.logaddexp(0.0, -a) + p * a))


def _stack(desc, llr, L, stack_cap, bias, op_cap) -> DecodeResult:
    if L < 1 or stack_cap < L:
        raise ConfigInvalid("need L >= 1 and stack_cap >= L")
    llr_t, m, frz, mptr, midx, check = _prep(desc, llr)
    u, x, metric, status, ops, work = _stack_kernel(
        llr_t, m, frz, mptr, midx, int(L), int(stack_cap), float(bias), desc.positions, check, int(op_cap))
    if status == 0:
        return _result(desc, u, x, metric, Status.OK, ops, work)
    return _result(desc, u, x, metric, Status.ABANDONED, ops, work, found=False)


def scs_decode(desc: PolarDescriptor, llr, L: int, stack_cap: int | None = None, op_cap: int = 0) -> DecodeResult:
    """Best-first search on the path metric."""
    return _stack(desc, llr, L, 16 * L if stack_cap is None else stack_cap, 0.0, op_cap)


def sq_decode(desc: PolarDescriptor, llr, L: int, bias: float | None = None,
              stack_cap: int | None = None, op_cap: int = 0) -> DecodeResult:
    """Best-first search on ``metric - bias * depth``.

    The default bias is the mean posterior entropy of the received bits, so
    the score of the correct path stays roughly flat as it deepens.
    """
    if bias is None:
        bias = mean_posterior_entropy(llr)
    res = _stack(desc, llr, L, 16 * L if stack_cap is None else stack_cap, bias, op_cap)
    extra = OpCounters(2 * desc.code_length, 2 * desc.code_length, 0)
    return DecodeResult(res.codeword, res.info, res.status, res.score, res.counters + extra, res.work, res.found)


def search_decode(desc: PolarDescriptor, llr, config: SearchConfig, op_cap: int = 0) -> DecodeResult:
    if config.mode is Mode.SC:
        return sc_decode(desc, llr)
    if config.mode is Mode.SCL:
        return scl_decode(desc, llr, config.L, op_cap)
    if config.mode is Mode.SCS:
        return scs_decode(desc, llr, config.L, config.cap, op_cap)
    return sq_decode(desc, llr, config.L, config.bias, config.cap, op_cap)

"""Puncturing and nested rate-compatible code families."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import RankDeficient, UnsupportedParams
from ..gf2 import BitMatrix, rank
from .bch import build_ebch
from .core import Code, CodeSpec, Family
from .polar import attach_crc, build_polar
from .random import GreedyColumnSelector, default_eval_snr
from .spectrum import EXHAUSTIVE_MAX_K, codeword_words, min_distance, pairwise_error


def puncture(mother: Code, keep) -> Code:
    """Keep only the listed columns (in the given order)."""
    keep = np.asarray(keep, dtype=np.int64)
    if keep.size < mother.k:
        raise RankDeficient(f"|keep|={keep.size} < k={mother.k}")
    if np.unique(keep).size != keep.size or keep.min() < 0 or keep.max() >= mother.n:
        raise UnsupportedParams("keep must list distinct mother columns")
    G = mother.G.select_columns(keep)
    if rank(G) != mother.k:
        raise RankDeficient("punctured generator lost rank")
    if keep.size == mother.n and np.array_equal(keep, np.arange(mother.n)):
        return mother
    params = dict(mother.spec.params, punctured_from=mother.n, keep=keep.tolist())
    return Code(CodeSpec(mother.family, int(keep.size), mother.k, params), G)


@dataclass
class RcFamily:
    """Codes of fixed ``k`` whose generator matrices are nested column sets.

    ``nested[n]`` lists the mother columns used at length ``n``; every
    shorter length's list is a prefix-closed subset of the longer one.
    """

    k: int
    lengths: list[int]
    mother: Code
    nested: dict[int, tuple[int, ...]] = field(default_factory=dict)
    label: str = ""

    def code(self, n: int) -> Code:
        code = puncture(self.mother, self.nested[n])
        if code.k <= EXHAUSTIVE_MAX_K and code.spectrum is None:
            spectrum = np.bincount(np.bitwise_count(codeword_words(code.G)).sum(axis=1), minlength=code.n + 1)
            code.spectrum = spectrum
            code.dH = min_distance(spectrum)
        return code

    def is_nested(self) -> bool:
        ls = sorted(self.nested)
        return all(set(self.nested[a]) <= set(self.nested[b]) for a, b in zip(ls, ls[1:]))


def _greedy_removal_order(mother: Code, n_min: int, target: float) -> list[int]:
    """Columns of ``mother`` in the order they are punctured away.

    Each step drops the column whose removal gives the smallest union bound
    at the normal-approximation operating point of the shortened length.
    """
    k = mother.k
    words = codeword_words(mother.G)
    bits = np.stack([(words[:, c >> 6] >> np.uint64(c & 63)) & np.uint64(1) for c in range(mother.n)],
                    axis=1).astype(np.int64)[1:]
    weights = bits.sum(axis=1)
    alive = list(range(mother.n))
    removed = []
    while len(alive) > n_min:
        n_next = len(alive) - 1
        q = pairwise_error(np.arange(mother.n + 1), default_eval_snr(n_next, k, target) if n_next > k else 0.0)
        best, best_score = None, np.inf
        for c in alive:
            w = weights - bits[:, c]
            if np.any(w == 0):
                continue
            score = q[w].sum()
            if score < best_score:
                best, best_score = c, score
        if best is None:
            raise RankDeficient(f"cannot puncture below length {len(alive)}")
        weights = weights - bits[:, best]
        alive.remove(best)
        removed.append(best)
    return removed


def build_rc(family: Family | str, k: int, lengths, *, seed: int = 0, candidates_per_step: int = 100,
             crc_poly: str | int = "CRC4", target: float = 1e-4) -> RcFamily:
    """Nested RC family over ``lengths`` (ascending).

    Structured families puncture a power-of-two mother code in greedy
    union-bound order. ``RANDOM_GREEDY`` appends greedily selected columns to
    ``[I_k]``; ``RANDOM`` appends uniformly random columns (one candidate per
    step) for comparison.
    """
    family = Family(family)
    lengths = sorted(int(x) for x in lengths)
    if lengths[0] < k:
        raise UnsupportedParams("every length must be >= k")
    n_max = lengths[-1]
    if family in (Family.RANDOM_GREEDY, Family.RANDOM):
        cands = candidates_per_step if family is Family.RANDOM_GREEDY else 1
        sel = GreedyColumnSelector(k, seed, cands)
        while sel.n < n_max:
            sel.step(default_eval_snr(sel.n + 1, k, target) if sel.n + 1 > k else 0.0)
        params = {"seed": seed, "candidates_per_step": cands, "rc": True}
        mother = Code(CodeSpec(family, n_max, k, params), BitMatrix.from_array(sel.generator()))
        nested = {n: tuple(range(n)) for n in lengths}
        return RcFamily(k, lengths, mother, nested, label=family.value)

    N = 1 << max(0, (n_max - 1).bit_length())
    if family is Family.EBCH:
        mother = build_ebch(N, k)
    elif family is Family.POLAR:
        mother = build_polar(N, k)
    elif family is Family.CRC_POLAR:
        mother = attach_crc(N, k, crc_poly)
    else:
        raise UnsupportedParams(f"no RC construction for {family}")
    removed = _greedy_removal_order(mother, lengths[0], target)
    nested = {}
    for n in lengths:
        gone = set(removed[: N - n])
        nested[n] = tuple(c for c in range(N) if c not in gone)
    label = family.value if family is not Family.CRC_POLAR else f"CRC_POLAR[{crc_poly}]"
    return RcFamily(k, lengths, mother, nested, label=label)

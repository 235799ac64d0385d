"""Random linear codes, plain and with greedy union-bound column selection."""

from __future__ import annotations

import numba
import numpy as np

from ..errors import RankDeficient, UnsupportedParams
from ..gf2 import BitMatrix, rank
from .core import Code, CodeSpec, Family
from .spectrum import EXHAUSTIVE_MAX_K, min_distance, pairwise_error

RESAMPLE_CAP = 1000


def build_random(n: int, k: int, seed: int = 0) -> Code:
    """i.i.d. equiprobable generator entries, resampled until full rank."""
    rng = np.random.default_rng(seed)
    for _ in range(RESAMPLE_CAP):
        G = BitMatrix.from_array(rng.integers(0, 2, size=(k, n), dtype=np.uint8))
        if rank(G) == k:
            return Code(CodeSpec(Family.RANDOM, n, k, {"seed": seed}), G)
    raise RankDeficient(f"no rank-{k} sample in {RESAMPLE_CAP} draws")


def default_eval_snr(n: int, k: int, target: float = 1e-4) -> float:
    from ..analysis import snr_for_normal_approx

    return snr_for_normal_approx(n, k, target)


@numba.njit(cache=True)
def _score_candidates(messages, weights, cand, q):
    """Union-bound sum of every candidate column appended to the current code."""
    out = np.zeros(cand.size)
    for j in range(cand.size):
        c = cand[j]
        acc = 0.0
        # message 0 is the all-zero codeword and never contributes
        for m in range(1, messages.size):
            x = messages[m] & c
            par = 0
            while x:
                x &= x - np.uint64(1)
                par ^= 1
            acc += q[weights[m] + par]
        out[j] = acc
    return out


class GreedyColumnSelector:
    """Grow a systematic generator ``[I_k | ...]`` one column at a time.

    Keeps the weight of every message's codeword so each candidate column is
    scored by an exhaustive union bound without re-enumerating the codebook.
    """

    def __init__(self, k: int, seed: int, candidates_per_step: int = 100):
        if k > EXHAUSTIVE_MAX_K:
            raise UnsupportedParams(f"greedy selection needs k <= {EXHAUSTIVE_MAX_K}, got {k}")
        if candidates_per_step < 1:
            raise UnsupportedParams("candidates_per_step must be >= 1")
        self.k = k
        self.candidates = candidates_per_step
        self.rng = np.random.default_rng(seed)
        self.messages = np.arange(1 << k, dtype=np.uint64)
        self.weights = np.bitwise_count(self.messages).astype(np.int64)
        self.columns: list[int] = [1 << i for i in range(k)]

    @property
    def n(self) -> int:
        return len(self.columns)

    def step(self, esn0_db: float) -> int:
        cand = self.rng.integers(0, 1 << self.k, size=self.candidates, dtype=np.uint64)
        q = pairwise_error(np.arange(self.n + 2), esn0_db)
        scores = _score_candidates(self.messages, self.weights, cand, q)
        best = int(np.argmin(scores))
        self.weights = self.weights + (np.bitwise_count(self.messages & cand[best]) & 1).astype(np.int64)
        self.columns.append(int(cand[best]))
        return int(cand[best])

    def generator(self) -> np.ndarray:
        cols = np.array(self.columns, dtype=np.uint64)
        return ((cols[None, :] >> np.arange(self.k, dtype=np.uint64)[:, None]) & np.uint64(1)).astype(np.uint8)

    def spectrum(self) -> np.ndarray:
        return np.bincount(self.weights, minlength=self.n + 1)


def greedy_select_random(n: int, k: int, seed: int = 0, candidates_per_step: int = 100,
                         eval_snr: float | None = None) -> Code:
    """Random code whose columns are picked greedily to minimise the union bound at ``eval_snr``.

    ``eval_snr`` defaults to the Es/N0 at which the normal approximation of
    ``(n, k)`` predicts BLER 1e-4.
    """
    if n < k:
        raise UnsupportedParams("n must be >= k")
    if eval_snr is None:
        eval_snr = default_eval_snr(n, k) if n > k else 0.0
    sel = GreedyColumnSelector(k, seed, candidates_per_step)
    while sel.n < n:
        sel.step(eval_snr)
    spectrum = sel.spectrum()
    spec = CodeSpec(Family.RANDOM_GREEDY, n, k, {
        "seed": seed, "candidates_per_step": candidates_per_step, "eval_snr": float(eval_snr)})
    return Code(spec, BitMatrix.from_array(sel.generator()), dH=min_distance(spectrum), spectrum=spectrum)

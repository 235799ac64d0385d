"""Benchmarks and audits: normal approximation, ML-error audit, op metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .codes.spectrum import qfunc
from .result import OpCounters

GH_NODES = 63


@lru_cache(maxsize=1)
def _hermite():
    x, w = np.polynomial.hermite.hermgauss(GH_NODES)
    return x, w / np.sqrt(np.pi)


def biawgn_capacity_dispersion(esn0_db: float) -> tuple[float, float]:
    """Capacity (bits) and dispersion (bits^2) of the coded-bit channel.

    Each QPSK dimension is BPSK with amplitude sqrt(Es/2) and noise variance
    N0/2, so the LLR of a transmitted 0 is N(2g, 4g) with g = Es/N0.
    """
    g = 10.0 ** (esn0_db / 10.0)
    x, w = _hermite()
    L = 2.0 * g + np.sqrt(2.0) * 2.0 * np.sqrt(g) * x
    info = 1.0 - np.logaddexp(0.0, -L) / np.log(2.0)
    C = float(np.dot(w, info))
    V = float(np.dot(w, (info - C) ** 2))
    return C, V


def normal_approx_bler(n: int, k: int, esn0_db: float) -> float:
    """Q((nC - k + log2(n)/2) / sqrt(nV))."""
    C, V = biawgn_capacity_dispersion(esn0_db)
    if V <= 0.0:
        return 0.0 if n * C > k else 1.0
    return float(qfunc((n * C - k + 0.5 * math.log2(n)) / math.sqrt(n * V)))


def snr_for_normal_approx(n: int, k: int, target: float, lo: float = -15.0, hi: float = 30.0) -> float:
    """Es/N0 (dB) at which the normal approximation equals ``target``."""
    f = lambda s: math.log(max(normal_approx_bler(n, k, s), 1e-300)) - math.log(target)
    return float(brentq(f, lo, hi, xtol=1e-6))


@dataclass
class MlAudit:
    trials: int = 0
    errors: int = 0
    ml_errors: int = 0

    def __post_init__(self):
        if not 0 <= self.ml_errors <= self.errors <= self.trials:
            raise ValueError("need ml_errors <= errors <= trials")

    def add(self, error: bool, ml_error: bool) -> None:
        self.trials += 1
        self.errors += int(error)
        self.ml_errors += int(ml_error and error)


def is_ml_error(llr, transmitted, candidate, candidate_found: bool = True) -> bool:
    """True when an exact ML decoder would not have returned ``transmitted`` either.

    ``candidate`` is the decoded word (or best syndrome-valid word seen by an
    abandoned decode); ``candidate_found=False`` means none was seen.
    """
    from .osd import soft_distance

    if not candidate_found:
        return False
    llr = np.asarray(llr)
    hard = (llr < 0).astype(np.uint8)
    return soft_distance(candidate, hard, llr) <= soft_distance(transmitted, hard, llr)


def ml_bound(audit: MlAudit) -> float:
    if audit.trials < 1:
        raise ValueError("ml_bound needs at least one trial")
    return audit.ml_errors / audit.trials


def ops_per_info_bit(counters: OpCounters, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    return counters.total / k

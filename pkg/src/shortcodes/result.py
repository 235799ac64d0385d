"""Decoder output and operation counters shared by every decoder."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Status(str, Enum):
    OK = "OK"
    ABANDONED = "ABANDONED"


@dataclass
class OpCounters:
    """Real-valued operation tallies for one decode.

    Binary XORs count as additions (one per bit), transcendental evaluations
    (exp, log) count as multiplications, data-dependent branches as comparisons.
    """

    additions: int = 0
    multiplications: int = 0
    comparisons: int = 0

    @property
    def total(self) -> int:
        return self.additions + self.multiplications + self.comparisons

    def __add__(self, other: "OpCounters") -> "OpCounters":
        return OpCounters(
            self.additions + other.additions,
            self.multiplications + other.multiplications,
            self.comparisons + other.comparisons,
        )

    @classmethod
    def from_array(cls, a) -> "OpCounters":
        return cls(int(a[0]), int(a[1]), int(a[2]))


@dataclass(frozen=True)
class DecodeResult:
    """One decode.

    ``work`` is the decoder-native effort unit: test error patterns for OSD,
    noise queries for GRAND, LLR kernel updates for the SC family.
    When ``status`` is ABANDONED, ``codeword`` holds the best candidate seen
    (or the hard decision if none was found) and ``found`` tells which.
    """

    codeword: np.ndarray
    info: np.ndarray
    status: Status
    score: float
    counters: OpCounters = field(default_factory=OpCounters)
    work: int = 0
    found: bool = True

    @property
    def ok(self) -> bool:
        return self.status is Status.OK

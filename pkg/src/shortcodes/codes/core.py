from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from ..errors import DimensionMismatch, RankDeficient, UnsupportedParams
from ..gf2 import BitMatrix, Permutation, dual, gauss_systematic, inverse, rank


class Family(str, Enum):
    EBCH = "EBCH"
    POLAR = "POLAR"
    CRC_POLAR = "CRC_POLAR"
    PAC = "PAC"
    RANDOM = "RANDOM"
    RANDOM_GREEDY = "RANDOM_GREEDY"


@dataclass(frozen=True)
class CodeSpec:
    family: Family
    n: int
    k: int
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not 1 <= self.k <= self.n:
            raise UnsupportedParams(f"need 1 <= k <= n, got n={self.n}, k={self.k}")

    @property
    def rate(self) -> float:
        return self.k / self.n


class Code:
    """A binary linear ``(n, k)`` code with generator ``G`` and parity-check ``H``.

    ``H`` is ``None`` only for the trivial full-space code (``k == n``).
    ``descriptor`` is set for codes with a native polar-transform description.
    """

    def __init__(self, spec: CodeSpec, G: BitMatrix, H: BitMatrix | None = None, *,
                 dH: int | None = None, spectrum: np.ndarray | None = None, descriptor=None,
                 verify: bool = True):
        if G.shape != (spec.k, spec.n):
            raise DimensionMismatch(f"G is {G.shape}, spec says {(spec.k, spec.n)}")
        if H is None and spec.k < spec.n:
            H = dual(G)
        self.spec = spec
        self.G = G
        self.H = H
        self.dH = dH
        self.spectrum = spectrum
        self.descriptor = descriptor
        if verify:
            self.verify()
        _, eff = gauss_systematic(G)
        self._info_cols = eff.map[: spec.k].copy()
        self._info_inv = inverse(G.select_columns(self._info_cols)).to_array().astype(np.int64)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def family(self) -> Family:
        return self.spec.family

    def __repr__(self) -> str:
        return f"Code({self.family.value}, n={self.n}, k={self.k})"

    def verify(self) -> None:
        if rank(self.G) != self.k:
            raise RankDeficient(f"rank(G) != k={self.k}")
        if self.H is not None:
            if self.H.shape != (self.n - self.k, self.n):
                raise DimensionMismatch(f"H is {self.H.shape}")
            if rank(self.H) != self.n - self.k:
                raise RankDeficient("rank(H) != n-k")
            if not self.G.matmul(self.H.transpose()).is_zero():
                raise RankDeficient("G H^T != 0")
        if self.spectrum is not None:
            s = np.asarray(self.spectrum)
            if s[0] != 1 or int(s.sum()) != 2**self.k:
                raise ValueError("weight spectrum must have A_0 = 1 and sum 2^k")

    def encode(self, u) -> np.ndarray:
        from ..gf2 import encode

        return encode(self.G, u)

    def info_from_codeword(self, c) -> np.ndarray:
        """Recover the message ``u`` with ``u @ G = c``."""
        c = np.asarray(c, dtype=np.int64)
        return ((c[..., self._info_cols] @ self._info_inv) & 1).astype(np.uint8)

    def is_codeword(self, c) -> bool:
        if self.H is None:
            return True
        from ..gf2 import syndrome

        return not syndrome(self.H, c).any()

    def permuted(self, perm: Permutation) -> "Code":
        """Same code with columns reordered (column ``j`` becomes old column ``perm.map[j]``)."""
        return Code(self.spec, self.G.permute_columns(perm),
                    None if self.H is None else self.H.permute_columns(perm),
                    dH=self.dH, spectrum=self.spectrum, verify=False)

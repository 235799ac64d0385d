"""Decoder registry: build a ``llr -> DecodeResult`` callable from a plain spec dict.

Specs look like ``{"name": "osd", "order": 4, "variant": "PB"}``; the names are
``ml``, ``osd``, ``grand``, ``sc``, ``scl``, ``scs`` and ``sq``.
"""

from __future__ import annotations

from typing import Any, Callable

import numpy as np

from .codes.core import Code
from .codes.spectrum import EXHAUSTIVE_MAX_K, codeword_words
from .errors import ConfigInvalid, UnsupportedParams
from .gf2 import unpack_rows
from .grand import GrandConfig, grand_decode
from .osd import OsdConfig, osd_decode
from .result import DecodeResult, OpCounters, Status
from .scfamily import Mode, SearchConfig, descriptor_for, search_decode

Decoder = Callable[..., DecodeResult]

NAMES = ("ml", "osd", "grand", "sc", "scl", "scs", "sq")
ML_MAX_K = 16


class BruteForceMl:
    """Exhaustive ML over all ``2**k`` codewords; ties go to the lowest message index."""

    def __init__(self, code: Code):
        if code.k > min(ML_MAX_K, EXHAUSTIVE_MAX_K):
            raise UnsupportedParams(f"brute-force ML needs k <= {ML_MAX_K}")
        self.code = code
        self.codewords = unpack_rows(codeword_words(code.G), code.n).astype(np.float64)

    def __call__(self, llr, op_cap: int = 0) -> DecodeResult:
        llr = np.asarray(llr, dtype=float)
        # correlation with the LLRs ranks codewords exactly as the discrepancy does
        corr = self.codewords @ llr
        best = int(np.argmin(corr))
        cw = self.codewords[best].astype(np.uint8)
        hard = (llr < 0).astype(np.uint8)
        score = float(np.abs(llr)[cw != hard].sum())
        size = self.codewords.size
        info = ((best >> np.arange(self.code.k)) & 1).astype(np.uint8)
        return DecodeResult(cw, info, Status.OK, score, OpCounters(size, 0, self.codewords.shape[0]),
                            self.codewords.shape[0])


def make_decoder(code: Code, spec: dict[str, Any]) -> Decoder:
    """Return ``decode(llr, op_cap=0) -> DecodeResult`` for ``code``.

    Raises:
        ConfigInvalid: for unknown names or parameters.
    """
    spec = dict(spec)
    name = str(spec.pop("name", "")).lower()
    try:
        if name == "ml":
            return BruteForceMl(code)
        if name == "osd":
            cfg = OsdConfig(**spec)
            return lambda llr, op_cap=0: osd_decode(code, llr, cfg, op_cap=op_cap)
        if name == "grand":
            cfg = GrandConfig(**spec)
            return lambda llr, op_cap=0: grand_decode(code, llr, cfg, op_cap=op_cap)
        if name in ("sc", "scl", "scs", "sq"):
            cfg = SearchConfig(mode=Mode(name.upper()), **spec)
            desc = descriptor_for(code)

            def run(llr, op_cap=0):
                r = search_decode(desc, llr, cfg, op_cap=op_cap)
                return DecodeResult(r.codeword, code.info_from_codeword(r.codeword), r.status, r.score,
                                    r.counters, r.work, r.found)

            return run
    except TypeError as exc:
        raise ConfigInvalid(f"bad parameters for decoder {name!r}: {exc}") from exc
    raise ConfigInvalid(f"unknown decoder {name!r}; choose from {', '.join(NAMES)}")

"""Build any supported code from a family name and keyword parameters."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import UnsupportedParams
from .bch import build_ebch
from .core import Code, Family
from .polar import PAC_CONV_POLY, attach_crc, build_pac, build_polar
from .random import build_random, greedy_select_random
from .rc import puncture


def read_index_file(path) -> np.ndarray:
    """Whitespace- or comma-separated integers (``#`` starts a comment)."""
    text = "\n".join(ln.split("#", 1)[0] for ln in Path(path).read_text().splitlines())
    return np.array([int(t) for t in text.replace(",", " ").split()], dtype=np.int64)


def build_code(family: Family | str, n: int, k: int, *, seed: int = 0, design_snr_db: float | None = None,
               crc_poly: str | int = "CRC11", conv_poly=PAC_CONV_POLY, candidates_per_step: int = 100,
               eval_snr: float | None = None, reliability=None, keep=None) -> Code:
    """Construct a code; ``keep`` (column indices) punctures the length-``n`` result."""
    family = Family(family)
    if family is Family.EBCH:
        code = build_ebch(n, k)
    elif family is Family.POLAR:
        code = build_polar(n, k, design_snr_db, reliability)
    elif family is Family.CRC_POLAR:
        code = attach_crc(n, k, crc_poly, design_snr_db, reliability)
    elif family is Family.PAC:
        code = build_pac(n, k, conv_poly)
    elif family is Family.RANDOM:
        code = build_random(n, k, seed)
    elif family is Family.RANDOM_GREEDY:
        code = greedy_select_random(n, k, seed, candidates_per_step, eval_snr)
    else:  # pragma: no cover - Family is closed
        raise UnsupportedParams(str(family))
    if keep is not None:
        code = puncture(code, keep)
    return code

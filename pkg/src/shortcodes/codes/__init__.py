"""Code constructions: eBCH, polar, CRC-polar, PAC, random, greedy random, RC families."""

from __future__ import annotations

from .bch import build_ebch, ebch_polar_positions
from .core import Code, CodeSpec, Family
from .factory import build_code, read_index_file
from .io import load, save
from .polar import PolarDescriptor, attach_crc, build_pac, build_polar, linear_descriptor
from .random import build_random, greedy_select_random
from .rc import RcFamily, build_rc, puncture
from .spectrum import min_distance, pairwise_error, union_bound, weight_spectrum

__all__ = [
    "Code", "CodeSpec", "Family", "PolarDescriptor", "RcFamily",
    "attach_crc", "build_code", "build_ebch", "build_pac", "build_polar", "build_random", "build_rc",
    "ebch_polar_positions", "greedy_select_random", "linear_descriptor", "load", "min_distance",
    "pairwise_error", "puncture", "read_index_file", "save", "union_bound", "weight_spectrum",
]

"""Plain-text code files.

Layout::

    # shortcodes code v1
    family EBCH
    n 8
    k 4
    seed 0
    params {"designed_distance": 3}
    dH 4
    G
    <k hex rows>
    H
    <n-k hex rows>

Each hex row is an integer whose bit ``c`` is column ``c``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..gf2 import BitMatrix
from .core import Code, CodeSpec, Family

MAGIC = "# shortcodes code v1"


def _row_hex(bits: np.ndarray) -> str:
    value = int("".join(str(int(b)) for b in bits[::-1]), 2)
    return format(value, f"0{(bits.size + 3) // 4}x")


def _hex_row(text: str, n: int) -> np.ndarray:
    value = int(text, 16)
    if value >> n:
        raise ValueError(f"hex row {text!r} has bits beyond column {n - 1}")
    return np.array([(value >> c) & 1 for c in range(n)], dtype=np.uint8)


def dumps(code: Code) -> str:
    lines = [
        MAGIC,
        f"family {code.family.value}",
        f"n {code.n}",
        f"k {code.k}",
        f"seed {code.spec.params.get('seed', '-')}",
        f"params {json.dumps(code.spec.params, sort_keys=True)}",
        f"dH {code.dH if code.dH is not None else '-'}",
        "G",
        *(_row_hex(r) for r in code.G.to_array()),
    ]
    if code.H is not None:
        lines += ["H", *(_row_hex(r) for r in code.H.to_array())]
    return "\n".join(lines) + "\n"


def loads(text: str) -> Code:
    """Parse a code file; ranks and ``G H^T = 0`` are re-checked."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != MAGIC:
        raise ValueError("not a shortcodes code file")
    header, i = {}, 1
    while lines[i] not in ("G",):
        key, _, value = lines[i].partition(" ")
        header[key] = value
        i += 1
    n, k = int(header["n"]), int(header["k"])
    G = np.array([_hex_row(r, n) for r in lines[i + 1 : i + 1 + k]])
    i += 1 + k
    H = None
    if i < len(lines) and lines[i] == "H":
        H = BitMatrix.from_array(np.array([_hex_row(r, n) for r in lines[i + 1 : i + 1 + n - k]]))
    params = json.loads(header.get("params", "{}"))
    dH = None if header.get("dH", "-") == "-" else int(header["dH"])
    code = Code(CodeSpec(Family(header["family"]), n, k, params), BitMatrix.from_array(G), H, dH=dH)
    code.descriptor = _rebuild_descriptor(code)
    return code


def _rebuild_descriptor(code: Code):
    from .polar import linear_descriptor, static_descriptor

    p = code.spec.params
    if "keep" in p or "info_set" not in p:
        return None
    info = np.asarray(p["info_set"], dtype=np.int64)
    if code.family is Family.POLAR:
        return static_descriptor(code.n, info)
    if code.family is Family.CRC_POLAR:
        return static_descriptor(code.n, info, crc_poly=int(p["crc_poly"], 16), check=code.H)
    if code.family is Family.PAC:
        from .polar import PolarDescriptor

        d = linear_descriptor(code)
        return PolarDescriptor(d.n, d.info_set, d.frozen_masks, d.is_frozen, d.positions,
                               conv_poly=tuple(p["conv_poly"]))
    return None


def save(code: Code, path) -> None:
    Path(path).write_text(dumps(code))


def load(path) -> Code:
    return loads(Path(path).read_text())

"""Shared test plumbing: noisy observations of random codewords."""

from __future__ import annotations

import numpy as np

from shortcodes.channel import ChannelParams, llr, modulate_qpsk, transmit


def noisy(code, snr_db: float, rng: np.random.Generator):
    """Random message through QPSK/AWGN; returns ``(message, codeword, llr)``."""
    u = rng.integers(0, 2, code.k).astype(np.uint8)
    c = code.encode(u)
    bits = c if c.size % 2 == 0 else np.append(c, 0)
    p = ChannelParams(snr_db)
    L = llr(transmit(modulate_qpsk(bits), p, rng), p)[: c.size]
    return u, c, L


# criterion number -> list of (ok, detail) parts, printed at the end of the run
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def report(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")


def acceptance_lines() -> list[str]:
    out = []
    for c in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[c]
        verdict = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        out.append(f"criterion {c}: {verdict} | " + "; ".join(d for _, d in parts))
    return out

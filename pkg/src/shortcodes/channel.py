"""QPSK over complex AWGN with Es = 1, exact per-bit LLRs and hard decisions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OddLength

ES = 1.0
AMP = np.sqrt(0.5)


@dataclass(frozen=True)
class ChannelParams:
    esn0_db: float
    seed: int = 0

    @property
    def n0(self) -> float:
        return ES / 10.0 ** (self.esn0_db / 10.0)


def stream(*key: int) -> np.random.Generator:
    """Counter-based generator keyed by integers such as (master seed, point, block)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(x) for x in key])))


def modulate_qpsk(bits) -> np.ndarray:
    """Gray QPSK: bits ``2j, 2j+1`` drive the real and imaginary parts of symbol ``j``.

    Accepts a single word or a ``(..., n)`` batch.
    """
    bits = np.asarray(bits)
    if bits.shape[-1] % 2:
        raise OddLength(f"QPSK needs an even number of bits, got {bits.shape[-1]}")
    s = AMP * (1.0 - 2.0 * bits.astype(float))
    return s[..., 0::2] + 1j * s[..., 1::2]


def transmit(symbols, params: ChannelParams, rng: np.random.Generator | None = None) -> np.ndarray:
    """``y = x + w`` with ``w`` circular complex Gaussian of total variance N0."""
    x = np.asarray(symbols, dtype=complex)
    if rng is None:
        rng = stream(params.seed)
    sigma = np.sqrt(params.n0 / 2.0)
    w = rng.standard_normal(x.shape + (2,)) * sigma
    return x + (w[..., 0] + 1j * w[..., 1])


def llr(received, params: ChannelParams) -> np.ndarray:
    """Per-bit LLRs ``2*sqrt(2)/N0 * y_i``, interleaving real and imaginary parts."""
    y = np.asarray(received)
    out = np.empty(y.shape[:-1] + (2 * y.shape[-1],))
    out[..., 0::2] = y.real
    out[..., 1::2] = y.imag
    return out * (2.0 * np.sqrt(2.0) / params.n0)


def hard_decision(values) -> np.ndarray:
    """Bit 0 iff LLR >= 0."""
    return (np.asarray(values) < 0).astype(np.uint8)

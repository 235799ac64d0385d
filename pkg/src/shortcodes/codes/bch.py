"""Narrow-sense primitive BCH codes extended by an overall parity bit.

Polynomials over GF(2) are Python ints with bit ``i`` holding the
coefficient of ``x**i``. Codeword position ``j < n-1`` carries the locator
``alpha**j``; the parity position ``n-1`` carries the zero element.
"""

from __future__ import annotations

import numpy as np

from ..errors import UnsupportedParams
from ..gf2 import BitMatrix
from .core import Code, CodeSpec, Family

# One fixed primitive polynomial per extension degree.
PRIMITIVE_POLYS = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
}


class GF2m:
    """GF(2^m) via exp/log tables over the fixed primitive polynomial."""

    def __init__(self, m: int):
        if m not in PRIMITIVE_POLYS:
            raise UnsupportedParams(f"no primitive polynomial stored for m={m}")
        self.m = m
        self.order = (1 << m) - 1
        self.exp = np.zeros(2 * self.order, dtype=np.int64)
        self.log = np.full(1 << m, -1, dtype=np.int64)
        x = 1
        for i in range(self.order):
            self.exp[i] = x
            self.log[x] = i
            x <<= 1
            if x >> m:
                x ^= PRIMITIVE_POLYS[m]
        self.exp[self.order:] = self.exp[: self.order]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def cyclotomic_coset(self, s: int) -> list[int]:
        coset, x = [], s % self.order
        while x not in coset:
            coset.append(x)
            x = (2 * x) % self.order
        return coset

    def minimal_polynomial(self, s: int) -> int:
        # product of (x + alpha^j) over the coset, coefficients in GF(2^m)
        coeffs = [1]
        for j in self.cyclotomic_coset(s):
            root = int(self.exp[j])
            nxt = [0] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i + 1] ^= c
                nxt[i] ^= self.mul(c, root)
            coeffs = nxt
        if any(c not in (0, 1) for c in coeffs):
            raise ArithmeticError("minimal polynomial left GF(2)")
        return sum(c << i for i, c in enumerate(coeffs))


def poly_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def bch_generator(m: int, designed: int) -> int:
    """Generator polynomial with zeros alpha^1 .. alpha^(designed-1)."""
    field = GF2m(m)
    g, seen = 1, set()
    for i in range(1, designed):
        rep = min(field.cyclotomic_coset(i))
        if rep not in seen:
            seen.add(rep)
            g = poly_mul(g, field.minimal_polynomial(rep))
    return g


def bch_design(m: int, k: int) -> tuple[int, int]:
    """Largest designed distance whose BCH code of length 2^m - 1 has dimension >= k.

    Returns ``(designed, generator)``.
    """
    N = (1 << m) - 1
    if not 1 <= k <= N:
        raise UnsupportedParams(f"k={k} out of range for BCH length {N}")
    best = (1, 1)
    for designed in range(2, N + 1):
        g = bch_generator(m, designed)
        if N - (g.bit_length() - 1) < k:
            break
        best = (designed, g)
    return best


def build_ebch(n: int, k: int) -> Code:
    """Extended BCH code of length ``n = 2**m``.

    When no designed distance gives dimension exactly ``k``, the first ``k``
    cyclic-shift rows of the next larger BCH code are kept. ``dH`` is the
    BCH bound of the extended code (designed distance + 1).
    """
    m = n.bit_length() - 1
    if n != 1 << m or m < 2:
        raise UnsupportedParams(f"eBCH length must be a power of two >= 4, got {n}")
    if k >= n:
        raise UnsupportedParams(f"k={k} must be < n={n}")
    N = n - 1
    designed, g = bch_design(m, k)
    # Bose distance: the largest designed distance with the same generator
    while designed < N and bch_generator(m, designed + 1) == g:
        designed += 1
    deg = g.bit_length() - 1
    gbits = np.array([(g >> i) & 1 for i in range(deg + 1)], dtype=np.uint8)
    G = np.zeros((k, n), dtype=np.uint8)
    for i in range(k):
        G[i, i : i + deg + 1] = gbits
    G[:, N] = G[:, :N].sum(axis=1) & 1
    spec = CodeSpec(Family.EBCH, n, k, {"designed_distance": int(designed), "generator": hex(g)})
    dH = designed + 1 if designed % 2 else designed
    return Code(spec, BitMatrix.from_array(G), dH=int(dH))


def ebch_polar_positions(n: int) -> np.ndarray:
    """Polar-transform index of each eBCH codeword position.

    Position ``j < n-1`` maps to the integer form of ``alpha**j`` in the
    polynomial basis, the parity position to 0.
    """
    m = n.bit_length() - 1
    field = GF2m(m)
    pos = np.empty(n, dtype=np.int64)
    pos[: n - 1] = field.exp[: n - 1]
    pos[n - 1] = 0
    return pos

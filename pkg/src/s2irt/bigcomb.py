"""Exact binomials and combinadic ranking over Python's arbitrary-precision ints.

Combinations are ranked in colexicographic order: a sorted index set
``c_1 < c_2 < ... < c_k`` has rank ``sum(C(c_t, t) for t = 1..k)``.
Bit strings are ``str`` objects over ``'0'``/``'1'``, read MSB first.
"""

from __future__ import annotations

import math
from typing import Sequence

BitString = str


class ExhaustedMessageError(ValueError):
    """Raised when a read runs past the end of a bit string."""


def binomial(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise ValueError(f"binomial arguments must be non-negative, got ({n}, {k})")
    if k > n:
        raise ValueError(f"binomial requires k <= n, got C({n}, {k})")
    return math.comb(n, k)


def comb_unrank(m: int, universe_size: int, k: int) -> tuple[int, ...]:
    """Return the k-subset of ``range(universe_size)`` with colex rank ``m``."""
    if k < 0 or k > universe_size:
        raise ValueError(f"cannot choose {k} of {universe_size}")
    total = math.comb(universe_size, k)
    if not 0 <= m < total:
        raise ValueError(f"rank {m} out of range [0, {total})")
    if k == 0:
        return ()

    picked = [0] * k
    # c walks downward; cur tracks C(c, t) so each step is one mul/div.
    c = universe_size - 1
    cur = math.comb(c, k)
    for t in range(k, 0, -1):
        while cur > m:
            # C(c-1, t) = C(c, t) * (c - t) / c
            cur = cur * (c - t) // c
            c -= 1
        picked[t - 1] = c
        m -= cur
        if t > 1:
            # C(c-1, t-1) = C(c, t) * t / c, the next candidate for the smaller slot
            cur = cur * t // c if c > 0 else 0
            c -= 1
    return tuple(picked)


def comb_rank(indices: Sequence[int], universe_size: int | None = None) -> int:
    """Colex rank of a strictly increasing index set (inverse of ``comb_unrank``)."""
    prev = -1
    for c in indices:
        if c <= prev:
            raise ValueError(f"combination must be strictly increasing: {list(indices)}")
        prev = c
    if indices and indices[0] < 0:
        raise ValueError("combination indices must be non-negative")
    if universe_size is not None and prev >= universe_size:
        raise ValueError(f"index {prev} outside universe of size {universe_size}")
    return sum(math.comb(c, t) for t, c in enumerate(indices, start=1))


def bit_budget(omega: int) -> int:
    """floor(log2(omega)), exact for arbitrarily large omega."""
    if omega < 1:
        raise ValueError(f"bit budget undefined for omega={omega}")
    return omega.bit_length() - 1


def read_bits_as_int(bits: BitString, offset: int, width: int) -> int:
    if offset < 0 or width < 0:
        raise ValueError("offset and width must be non-negative")
    if offset + width > len(bits):
        raise ExhaustedMessageError(
            f"read of {width} bits at offset {offset} exceeds message length {len(bits)}"
        )
    if width == 0:
        return 0
    return int(bits[offset : offset + width], 2)


def int_to_bits(m: int, width: int) -> BitString:
    if width < 0:
        raise ValueError("width must be non-negative")
    if m < 0 or m >> width:
        raise ValueError(f"{m} does not fit in {width} bits")
    if width == 0:
        return ""
    return format(m, f"0{width}b")


def validate_bits(bits: str) -> BitString:
    if bits.strip("01"):
        raise ValueError("bit string may only contain '0' and '1'")
    return bits


def bytes_to_bits(data: bytes) -> BitString:
    return "".join(format(b, "08b") for b in data)


def bits_to_bytes(bits: BitString) -> bytes:
    if len(bits) % 8:
        raise ValueError(f"bit length {len(bits)} is not a whole number of bytes")
    return int(bits, 2).to_bytes(len(bits) // 8, "big") if bits else b""

"""Capacity analysis, bpp, extraction accuracy and crack probability."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .bigcomb import BitString, binomial
from .codec import Scheme, StegParams, capacity_bits

MAX_EDIT_BITS = 10**6


def bpp(total_bits: int, width: int, height: int, channels: int) -> float:
    """Hidden bits per pixel per channel; ``total_bits`` counts secret bits, not latents."""
    size = width * height * channels
    if size <= 0:
        raise ValueError("image size must be positive")
    return total_bits / size


def levenshtein(a: str, b: str) -> int:
    """Edit distance via the Myers/Hyyro bit-vector recurrence (one big int per column)."""
    if len(a) > MAX_EDIT_BITS or len(b) > MAX_EDIT_BITS:
        raise ValueError(f"edit distance limited to {MAX_EDIT_BITS} symbols per stream")
    if len(a) < len(b):
        a, b = b, a
    m = len(b)
    if m == 0:
        return len(a)
    mask = (1 << m) - 1
    high = 1 << (m - 1)
    peq: dict[str, int] = {}
    for i, ch in enumerate(b):
        peq[ch] = peq.get(ch, 0) | (1 << i)
    pv, mv, score = mask, 0, m
    for ch in a:
        eq = peq.get(ch, 0)
        xv = eq | mv
        xh = (((eq & pv) + pv) ^ pv) | eq
        ph = mv | (mask ^ (xh | pv))
        mh = pv & xh
        if ph & high:
            score += 1
        elif mh & high:
            score -= 1
        ph = ((ph << 1) | 1) & mask
        mh = (mh << 1) & mask
        pv = mh | (mask ^ (xv | ph))
        mv = ph & xv
    return score


def ie_accuracy(sent: BitString, received: BitString) -> float:
    longest = max(len(sent), len(received))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(sent, received) / longest


def log2_omegas(params: StegParams) -> list[float]:
    K, n = params.K, params.n
    if params.scheme is Scheme.SE:
        return [n * math.log2(K - i + 1) for i in range(1, K)]
    N = params.N
    return [math.log2(binomial(N - (i - 1) * n, n)) for i in range(1, K)]


def stirling_estimate(params: StegParams) -> float:
    K, n = params.K, params.n
    if params.scheme is Scheme.SE:
        # n * log2(K!) with K! ~ sqrt(2 pi K) (K/e)^K
        return n * (0.5 * math.log2(2 * math.pi * K) + K * math.log2(K / math.e))
    # log2((Kn)! / (n!)^K) under Stirling
    return (
        -(K - 1) * math.log2(math.sqrt(2 * math.pi))
        + (K * n + 0.5) * math.log2(K)
        - (K - 1) / 2 * math.log2(n)
    )


@dataclass(frozen=True)
class CapacityReport:
    scheme: str
    K: int
    n: int
    n_total: int
    exact_bits: int
    sum_log2_omega: float
    lower_bound: float  # sum - (K-1) for s2irt, sum - n for se
    stirling_estimate: float
    bpp: float

    def sandwich_holds(self) -> bool:
        return self.lower_bound < self.exact_bits <= self.sum_log2_omega + 1e-9

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in asdict(self).items())


def capacity_report(params: StegParams, width: int | None = None, height: int = 1, channels: int = 1) -> CapacityReport:
    exact = capacity_bits(params)
    total = math.fsum(log2_omegas(params))
    slack = params.n if params.scheme is Scheme.SE else params.K - 1
    if width is None:
        width, height, channels = params.n_total, 1, 1
    return CapacityReport(
        scheme=params.scheme.value,
        K=params.K,
        n=params.n,
        n_total=params.n_total,
        exact_bits=exact,
        sum_log2_omega=total,
        lower_bound=total - slack,
        stirling_estimate=stirling_estimate(params),
        bpp=bpp(exact, width, height, channels),
    )


def crack_probability(params: StegParams) -> Fraction:
    K, n = params.K, params.n
    denom = 1
    for i in range(1, K):
        if params.scheme is Scheme.SE:
            denom *= (K - i + 1) ** n
        else:
            denom *= binomial(params.N - (i - 1) * n, n)
    return Fraction(1, denom)


def scientific(p: Fraction) -> tuple[float, int]:
    """(mantissa, exponent) with p = mantissa * 10**exponent and 1 <= mantissa < 10."""
    if p <= 0:
        raise ValueError("probability must be positive")
    num, den = p.numerator, p.denominator
    # log10 from the top 64 bits of each side, exact shift bookkeeping
    def log10_int(v: int) -> float:
        shift = max(v.bit_length() - 64, 0)
        return math.log10(v >> shift) + shift * math.log10(2)

    lg = log10_int(num) - log10_int(den)
    exponent = math.floor(lg)
    mantissa = 10 ** (lg - exponent)
    if mantissa >= 10:
        mantissa, exponent = mantissa / 10, exponent + 1
    return mantissa, exponent

"""Position-arrangement encoding of bit strings into Gaussian latent vectors.

Two schemes share the pool/grouping machinery:

* ``s2irt``: group i (1..K-1) picks n of the remaining positions, the choice
  indexed by a combinadic rank read from the message.
* ``se``: the remaining positions are cut into n consecutive blocks of
  K-i+1 and group i takes one slot per block, so an error stays inside the
  block of K positions it occurred in.

Arrangements (``ind``) are int arrays of 1-based group numbers, one per
position of the first N = K*n latent entries.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .bigcomb import (
    BitString,
    binomial,
    bit_budget,
    comb_rank,
    comb_unrank,
    int_to_bits,
    read_bits_as_int,
    validate_bits,
)
from .latent import (
    ElementPool,
    GroupingSpec,
    build_grouping,
    regroup_recovered,
    sample_pool,
)
from .mapper import (
    InvertibleMapper,
    QuantizedImage,
    dequantize,
    image_shape_for,
    quantize,
)
from .prng import (
    KEY_BYTES,
    MASK64,
    TAG_GROUP_ORDER,
    TAG_LEFTOVER,
    TAG_PADDING,
    Xoshiro256,
    fisher_yates,
    scramble_permutation,
)

HEADER_BITS = 32


class Scheme(str, enum.Enum):
    S2IRT = "s2irt"
    SE = "se"


class FramingError(ValueError):
    pass


class CapacityError(ValueError):
    def __init__(self, message_bits: int, max_payload_bits: int):
        self.message_bits = message_bits
        self.max_payload_bits = max_payload_bits
        super().__init__(
            f"message of {message_bits} bits exceeds the {max_payload_bits}-bit payload capacity"
        )


@dataclass(frozen=True)
class StegParams:
    K: int
    n: int
    n_total: int
    key: bytes
    scheme: Scheme = Scheme.S2IRT

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.K < 2:
            raise ValueError(f"K must be at least 2, got {self.K}")
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if self.K * self.n > self.n_total:
            raise ValueError(f"K*n = {self.K * self.n} exceeds latent dimension {self.n_total}")
        if len(self.key) != KEY_BYTES:
            raise ValueError(f"key must be {KEY_BYTES} bytes")

    @property
    def N(self) -> int:
        return self.K * self.n

    def grouping(self) -> GroupingSpec:
        return build_grouping(self.K, self.n)


def group_budgets(K: int, n: int, scheme: Scheme | str) -> list[int]:
    """Bits carried by each encoding group 1..K-1 (per element for SE)."""
    scheme = Scheme(scheme)
    N = K * n
    if scheme is Scheme.S2IRT:
        return [bit_budget(binomial(N - (i - 1) * n, n)) for i in range(1, K)]
    return [bit_budget(K - i + 1) for i in range(1, K)]


def capacity_bits(params: StegParams) -> int:
    budgets = group_budgets(params.K, params.n, params.scheme)
    if params.scheme is Scheme.SE:
        return params.n * sum(budgets)
    return sum(budgets)


def max_payload_bits(params: StegParams) -> int:
    return max(capacity_bits(params) - HEADER_BITS, 0)


# --- framing ---------------------------------------------------------------


def frame(payload: BitString, capacity: int, pad_rng: Xoshiro256) -> BitString:
    validate_bits(payload)
    room = capacity - HEADER_BITS
    if room < 0:
        raise FramingError(f"capacity of {capacity} bits cannot hold the {HEADER_BITS}-bit header")
    if len(payload) > room:
        raise CapacityError(len(payload), room)
    return int_to_bits(len(payload), HEADER_BITS) + payload + pad_rng.bits(room - len(payload))


@dataclass(frozen=True)
class ExtractResult:
    payload: BitString
    ok: bool  # header consistent with capacity
    declared_bits: int
    raw: BitString


def deframe(raw: BitString) -> ExtractResult:
    if len(raw) < HEADER_BITS:
        return ExtractResult(payload="", ok=False, declared_bits=0, raw=raw)
    declared = read_bits_as_int(raw, 0, HEADER_BITS)
    body = raw[HEADER_BITS:]
    if declared > len(body):
        return ExtractResult(payload=body, ok=False, declared_bits=declared, raw=raw)
    return ExtractResult(payload=body[:declared], ok=True, declared_bits=declared, raw=raw)


# --- arrangement -----------------------------------------------------------


def _check_length(bits: BitString, expected: int) -> None:
    if len(bits) != expected:
        raise FramingError(f"arrangement needs exactly {expected} bits, got {len(bits)}")


def arrange_s2irt(bits: BitString, K: int, n: int) -> np.ndarray:
    N = K * n
    budgets = group_budgets(K, n, Scheme.S2IRT)
    _check_length(bits, sum(budgets))
    ind = np.full(N, K, dtype=np.int64)
    remaining = list(range(N))
    offset = 0
    for i, width in enumerate(budgets, start=1):
        m = read_bits_as_int(bits, offset, width)
        offset += width
        sel = comb_unrank(m, len(remaining), n)
        for idx in sel:
            ind[remaining[idx]] = i
        chosen = set(sel)
        remaining = [p for j, p in enumerate(remaining) if j not in chosen]
    return ind


def arrange_se(bits: BitString, K: int, n: int) -> np.ndarray:
    N = K * n
    budgets = group_budgets(K, n, Scheme.SE)
    _check_length(bits, n * sum(budgets))
    ind = np.full(N, K, dtype=np.int64)
    remaining = list(range(N))
    offset = 0
    for i, width in enumerate(budgets, start=1):
        block = K - i + 1
        taken = set()
        for j in range(n):
            m = read_bits_as_int(bits, offset, width)
            offset += width
            pos = remaining[j * block + m]
            ind[pos] = i
            taken.add(pos)
        remaining = [p for p in remaining if p not in taken]
    return ind


def decode_s2irt(ind: np.ndarray, K: int, n: int) -> BitString:
    """Inverse of ``arrange_s2irt``; tolerates arrangements with wrong group counts."""
    budgets = group_budgets(K, n, Scheme.S2IRT)
    remaining = list(range(K * n))
    out = []
    for i, width in enumerate(budgets, start=1):
        sel = [j for j, p in enumerate(remaining) if ind[p] == i][:n]
        if len(sel) < n:
            spare = (j for j in range(len(remaining)) if j not in set(sel))
            sel = sorted(sel + [next(spare) for _ in range(n - len(sel))])
        m = min(comb_rank(sel), (1 << width) - 1)
        out.append(int_to_bits(m, width))
        drop = set(sel)
        remaining = [p for j, p in enumerate(remaining) if j not in drop]
    return "".join(out)


def decode_se(ind: np.ndarray, K: int, n: int) -> BitString:
    """Inverse of ``arrange_se``.

    Block j of every round is a subset of positions [j*K, (j+1)*K), so each
    K-block is decoded on its own; a corrupted block cannot disturb the others.
    """
    budgets = group_budgets(K, n, Scheme.SE)
    out = [""] * (n * (K - 1))
    for j in range(n):
        slots = list(range(j * K, (j + 1) * K))
        for i, width in enumerate(budgets, start=1):
            hits = [s for s, p in enumerate(slots) if ind[p] == i]
            m = hits[0] if hits else 0
            m = min(m, (1 << width) - 1)
            out[(i - 1) * n + j] = int_to_bits(m, width)
            del slots[hits[0] if hits else 0]
    return "".join(out)


def arrange(bits: BitString, params: StegParams) -> np.ndarray:
    if params.scheme is Scheme.SE:
        return arrange_se(bits, params.K, params.n)
    return arrange_s2irt(bits, params.K, params.n)


def decode_arrangement(ind: np.ndarray, params: StegParams) -> BitString:
    if params.scheme is Scheme.SE:
        return decode_se(ind, params.K, params.n)
    return decode_s2irt(ind, params.K, params.n)


# --- latent vector ---------------------------------------------------------


def _nonce(seed: int) -> tuple[int, int]:
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return seed & MASK64, seed >> 64


def build_vector(ind: np.ndarray, pool: ElementPool, params: StegParams, seed: int) -> np.ndarray:
    K, n, N = params.K, params.n, params.N
    ind = np.asarray(ind)
    if ind.shape != (N,) or pool.size != params.n_total:
        raise ValueError("arrangement and pool do not match the parameters")
    z = np.empty(params.n_total, dtype=np.float64)
    for g in range(1, K + 1):
        positions = np.flatnonzero(ind == g)
        if len(positions) != n:
            raise AssertionError(f"group {g} occupies {len(positions)} positions, expected {n}")
        members = pool.chosen[g - 1]
        if g == K:
            rng = Xoshiro256.keyed(params.key, TAG_GROUP_ORDER, *_nonce(seed))
            members = members[fisher_yates(n, rng)]
        z[positions] = pool.values[members]
    rng = Xoshiro256.keyed(params.key, TAG_LEFTOVER, *_nonce(seed))
    leftovers = pool.leftovers[fisher_yates(len(pool.leftovers), rng)]
    z[N:] = pool.values[leftovers]
    return z


def scramble(z: np.ndarray, key: bytes) -> np.ndarray:
    z = np.asarray(z)
    return z[scramble_permutation(key, len(z))]


def unscramble(z: np.ndarray, key: bytes) -> np.ndarray:
    z = np.asarray(z)
    out = np.empty_like(z)
    out[scramble_permutation(key, len(z))] = z
    return out


# --- pipelines -------------------------------------------------------------


def embed(message: BitString, params: StegParams, seed: int) -> np.ndarray:
    """Frame, arrange, build and scramble: the latent vector handed to a mapper."""
    capacity = capacity_bits(params)
    if len(message) > capacity - HEADER_BITS:
        raise CapacityError(len(message), max(capacity - HEADER_BITS, 0))
    framed = frame(message, capacity, Xoshiro256.keyed(params.key, TAG_PADDING, *_nonce(seed)))
    ind = arrange(framed, params)
    pool = sample_pool(params.grouping(), params.n_total, seed)
    return scramble(build_vector(ind, pool, params, seed), params.key)


def recover_arrangement(z: np.ndarray, params: StegParams) -> np.ndarray:
    z = unscramble(np.asarray(z, dtype=np.float64), params.key)
    return regroup_recovered(z[: params.N], params.grouping()) + 1


def recover(z: np.ndarray, params: StegParams) -> ExtractResult:
    """Inverse of ``embed`` on a (possibly perturbed) latent vector."""
    if len(z) != params.n_total:
        raise ValueError(f"latent vector has {len(z)} entries, expected {params.n_total}")
    return deframe(decode_arrangement(recover_arrangement(z, params), params))


def hide(
    message: BitString,
    params: StegParams,
    mapper: InvertibleMapper,
    seed: int,
    shape: tuple[int, int, int] | None = None,
) -> QuantizedImage:
    if mapper.dimension != params.n_total:
        raise ValueError("mapper dimension does not match the latent dimension")
    width, height, channels = shape or image_shape_for(params.n_total)
    return quantize(mapper.forward(embed(message, params, seed)), width, height, channels)


def extract(img: QuantizedImage, params: StegParams, mapper: InvertibleMapper) -> ExtractResult:
    if img.size != params.n_total:
        raise ValueError(f"image holds {img.size} samples, expected {params.n_total}")
    return recover(mapper.inverse(dequantize(img)), params)

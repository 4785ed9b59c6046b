"""Keyed deterministic PRNG: SplitMix64-expanded seed material feeding xoshiro256**.

Seed material is a sequence of 64-bit words: the four big-endian words of the
256-bit key, a domain tag, then any per-call nonce words. Each word is XORed
into a SplitMix64 state which is then advanced once; four further SplitMix64
outputs become the xoshiro256** state.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MASK64 = (1 << 64) - 1

# Domain-separation tags (ASCII, big-endian packed).
TAG_SCRAMBLE = int.from_bytes(b"scramble", "big")
TAG_PADDING = int.from_bytes(b"padding\0", "big")
TAG_GROUP_ORDER = int.from_bytes(b"grouplst", "big")
TAG_LEFTOVER = int.from_bytes(b"leftover", "big")

KEY_BYTES = 32


def _splitmix64(x: int) -> tuple[int, int]:
    """Advance state ``x``; return (new_state, output)."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return x, z ^ (z >> 31)


def key_words(key: bytes) -> tuple[int, int, int, int]:
    if len(key) != KEY_BYTES:
        raise ValueError(f"key must be {KEY_BYTES} bytes, got {len(key)}")
    return tuple(int.from_bytes(key[i : i + 8], "big") for i in range(0, KEY_BYTES, 8))


def parse_key(hex_key: str) -> bytes:
    if len(hex_key) != 2 * KEY_BYTES:
        raise ValueError(f"key must be {2 * KEY_BYTES} hex characters, got {len(hex_key)}")
    return bytes.fromhex(hex_key)


class Xoshiro256:
    """xoshiro256** generator with unbiased bounded draws."""

    def __init__(self, words: Iterable[int]):
        x = 0
        for w in words:
            x, _ = _splitmix64(x ^ (w & MASK64))
        s = []
        for _ in range(4):
            x, out = _splitmix64(x)
            s.append(out)
        if not any(s):
            s[0] = 1
        self.s = s

    @classmethod
    def keyed(cls, key: bytes, tag: int, *nonce: int) -> "Xoshiro256":
        return cls((*key_words(key), tag, *nonce))

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (((s1 * 5) & MASK64) << 7 | ((s1 * 5) & MASK64) >> 57) & MASK64
        result = (result * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        self.s = [s0, s1, s2, s3]
        return result

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection of the biased low range."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = (1 << 64) % bound
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % bound

    def bits(self, count: int) -> str:
        out = []
        while count > 0:
            take = min(count, 64)
            out.append(format(self.next_u64() >> (64 - take), f"0{take}b"))
            count -= take
        return "".join(out)


def fisher_yates(size: int, rng: Xoshiro256) -> np.ndarray:
    """Permutation of ``range(size)``, swapping from the top index down."""
    perm = list(range(size))
    for i in range(size - 1, 0, -1):
        j = rng.below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return np.asarray(perm, dtype=np.int64)


@lru_cache(maxsize=64)
def _scramble_perm(key: bytes, size: int) -> np.ndarray:
    perm = fisher_yates(size, Xoshiro256.keyed(key, TAG_SCRAMBLE, size))
    perm.setflags(write=False)
    return perm


def scramble_permutation(key: bytes, size: int) -> np.ndarray:
    return _scramble_perm(bytes(key), size)


def shuffled(items: Sequence, rng: Xoshiro256) -> list:
    perm = fisher_yates(len(items), rng)
    return [items[i] for i in perm]

"""Karp-Rabin polynomial signatures over byte strings.

A window ``text[start:start+length]`` hashes to
``sum(text[start+i] * base**(length-1-i)) mod modulus``.  Window starts are
0-based, like Python slicing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import gmpy2


@dataclass(frozen=True)
class KarpRabinHasher:
    modulus: int
    base: int
    _powers: list = field(default_factory=lambda: [1], repr=False, compare=False)

    def power(self, k: int) -> int:
        """base**k mod modulus, memoised."""
        powers = self._powers
        while len(powers) <= k:
            powers.append(powers[-1] * self.base % self.modulus)
        return powers[k]


def new_hasher(seed: int, modulus_bits: int = 61) -> KarpRabinHasher:
    """Deterministic hasher with a random prime modulus in [2**(bits-1), 2**bits)."""
    if not 8 <= modulus_bits <= 62:
        raise ValueError(f"modulus_bits must be in [8, 62], got {modulus_bits}")
    rng = random.Random(seed)
    lo, hi = 1 << (modulus_bits - 1), 1 << modulus_bits
    while True:
        p = int(gmpy2.next_prime(rng.randrange(lo, hi)))
        if p < hi:
            break
    return KarpRabinHasher(p, rng.randrange(2, p))


def hash_window(hasher: KarpRabinHasher, text: bytes, start: int, length: int) -> int:
    if start < 0 or length < 0 or start + length > len(text):
        raise IndexError(f"window [{start}, {start + length}) outside text of length {len(text)}")
    m, b = hasher.modulus, hasher.base
    h = 0
    for c in text[start:start + length]:
        h = (h * b + c) % m
    return h


def roll(hasher: KarpRabinHasher, signature: int, outgoing: int, incoming: int,
         window_length: int) -> int:
    """Shift a window one symbol to the right."""
    m = hasher.modulus
    top = hasher.power(window_length - 1)
    return ((signature - outgoing * top) * hasher.base + incoming) % m


def window_signatures(hasher: KarpRabinHasher, text: bytes, start: int, stop: int,
                      length: int) -> list[int]:
    """Signatures of every window of ``length`` inside text[start:stop], left to right.

    Same arithmetic as repeated :func:`roll`, inlined for the construction scans.
    """
    if length < 1:
        raise ValueError("window length must be positive")
    if stop - start < length:
        return []
    m, b = hasher.modulus, hasher.base
    top = hasher.power(length - 1)
    h = hash_window(hasher, text, start, length)
    out = [h]
    append = out.append
    for p in range(start, stop - length):
        h = ((h - text[p] * top) * b + text[p + length]) % m
        append(h)
    return out

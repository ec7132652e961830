"""Greedy LZ77 parsing.

The parse is only used to obtain the phrase count ``z``, which drives level
skipping in the builder and shows up in space reports.  Phrases may overlap
their source (``source + length > start``), and a symbol with no earlier
occurrence becomes a literal phrase of length zero.

Positions in :class:`Lz77Phrase` are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Lz77Phrase:
    start: int
    length: int  # 0 for a literal phrase
    source: int | None = None
    literal: int | None = None

    @property
    def span(self) -> int:
        """Number of text symbols covered by the phrase."""
        return self.length if self.length else 1


@dataclass(frozen=True)
class Lz77Parse:
    phrases: tuple[Lz77Phrase, ...]
    n: int

    def __len__(self):
        return len(self.phrases)


def suffix_array(text: bytes) -> np.ndarray:
    """Prefix-doubling suffix array, O(n log^2 n) with numpy sorts."""
    n = len(text)
    rank = np.frombuffer(text, dtype=np.uint8).astype(np.int64)
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        r1, r2 = rank[sa], second[sa]
        fresh = np.empty(n, dtype=bool)
        fresh[0] = True
        fresh[1:] = (r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1])
        rank = np.empty(n, dtype=np.int64)
        rank[sa] = np.cumsum(fresh) - 1
        if rank[sa[-1]] == n - 1:
            return sa
        k *= 2


def _common_prefix(text: bytes, a: int, b: int) -> int:
    """Length of the longest common prefix of text[a:] and text[b:]."""
    limit = len(text) - max(a, b)
    matched = 0
    step = 16
    while matched < limit:
        size = min(step, limit - matched)
        if text[a + matched:a + matched + size] == text[b + matched:b + matched + size]:
            matched += size
            step *= 2
            continue
        lo, hi = 0, size  # prefix of length lo matches, length hi does not
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if text[a + matched:a + matched + mid] == text[b + matched:b + matched + mid]:
                lo = mid
            else:
                hi = mid
        return matched + lo
    return matched


def _earlier_neighbours(sa: np.ndarray) -> tuple[list[int], list[int]]:
    """For each text position, the nearest suffixes in SA order that start earlier.

    Returns (psv, nsv) indexed by text position; -1 when no such suffix exists.
    Among all earlier suffixes, one of these two shares the longest prefix.
    """
    order = sa.tolist()
    n = len(order)
    psv = [-1] * n
    nsv = [-1] * n
    stack: list[int] = []
    for pos in order:
        while stack and stack[-1] > pos:
            stack.pop()
        psv[pos] = stack[-1] if stack else -1
        stack.append(pos)
    stack.clear()
    for pos in reversed(order):
        while stack and stack[-1] > pos:
            stack.pop()
        nsv[pos] = stack[-1] if stack else -1
        stack.append(pos)
    return psv, nsv


def parse(text: bytes) -> Lz77Parse:
    """Greedy left-to-right LZ77 parse with self-overlapping phrases."""
    if not text:
        raise ValueError("empty text")
    text = bytes(text)
    psv, nsv = _earlier_neighbours(suffix_array(text))
    phrases = []
    i = 0
    n = len(text)
    while i < n:
        best_len, best_src = 0, -1
        for j in (psv[i], nsv[i]):
            if j < 0:
                continue
            length = _common_prefix(text, j, i)
            if length > best_len or (length == best_len and length and j < best_src):
                best_len, best_src = length, j
        if best_len == 0:
            phrases.append(Lz77Phrase(i + 1, 0, literal=text[i]))
            i += 1
        else:
            phrases.append(Lz77Phrase(i + 1, best_len, source=best_src + 1))
            i += best_len
    return Lz77Parse(tuple(phrases), n)


def phrase_count(lz: Lz77Parse) -> int:
    return len(lz.phrases)


def decode(lz: Lz77Parse) -> bytes:
    out = bytearray()
    for ph in lz.phrases:
        if ph.length == 0:
            out.append(ph.literal)
            continue
        src = ph.source - 1
        if src < 0 or src >= len(out):
            raise ValueError(f"phrase at {ph.start}: source {ph.source} out of range")
        length = ph.length
        # overlapping copies repeat the period src..end
        while length > 0:
            chunk = out[src:src + length]
            out += chunk
            src += len(chunk)
            length -= len(chunk)
    if len(out) != lz.n:
        raise ValueError("parse does not cover its declared length")
    return bytes(out)

"""Block graph data model.

A :class:`BlockGraph` is a list of levels, top to bottom.  Every level is a
list of :class:`Block` objects ordered by position in the text.  Internal
blocks own a contiguous run of children on the next level; back-pointing
leaves refer to one or two marked blocks on their own level.

Block starts and offsets are 0-based internally.  The query functions convert
to and from the 1-based positions of their public signatures.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass
from functools import cached_property


class BlockKind(enum.IntEnum):
    INTERNAL = 0
    LITERAL = 1
    BACK = 2


@dataclass(frozen=True, slots=True)
class ExcessAugment:
    """Excess summary of one block, relative to the block start."""

    total: int
    min_prefix: int
    min_offset: int  # 0-based offset of the leftmost prefix attaining min_prefix

    @property
    def min_position(self) -> int:
        return self.min_offset + 1


@dataclass(frozen=True, slots=True)
class BackPointer:
    """Where an unmarked block's content first occurs.

    ``target`` indexes a marked block on the same level; when the occurrence
    runs past its end, the remainder lies in ``target + 1``.  ``offset`` is
    the 0-based start of the occurrence inside the first target and
    ``split`` is how many symbols of the block fall in the first target.
    """

    target: int
    offset: int
    split: int
    two_targets: bool
    rank_offset: tuple[int, ...]  # per tracked symbol, count in target[:offset]
    rank_split: tuple[int, ...]  # per tracked symbol, count in block[:split]
    # (min, offset) of prefix excess over the first `split` symbols and over
    # the rest; values are relative to the start of each part, offsets to the
    # start of the block
    excess_head: tuple[int, int] | None = None
    excess_tail: tuple[int, int] | None = None

    @property
    def g(self) -> int:
        return self.offset + 1

    @property
    def second_target(self) -> int | None:
        return self.target + 1 if self.two_targets else None


@dataclass(slots=True, eq=False)
class Block:
    start: int
    length: int
    kind: BlockKind
    first_child: int = -1
    child_count: int = 0
    literal: bytes = b""
    pointer: BackPointer | None = None
    prefix: bytes = b""
    suffix: bytes = b""
    rank_before: tuple[int, ...] = ()
    excess: ExcessAugment | None = None

    @property
    def end(self) -> int:
        return self.start + self.length

    @property
    def marked(self) -> bool:
        return self.kind != BlockKind.BACK


@dataclass(frozen=True)
class BuildConfig:
    """Construction parameters.

    ``None`` for ``leaf_block_len``/``affix_len``/``rank_symbols`` means
    "derive from the text" (see :meth:`resolve`).
    """

    arity: int = 4
    leaf_block_len: int | None = None
    affix_len: int | None = None
    rank_symbols: bytes | None = None
    enable_excess: bool = False
    hash_seed: int = 0
    hash_modulus_bits: int = 61
    level_skip: bool = True
    max_attempts: int = 16

    def resolve(self, text: bytes) -> "BuildConfig":
        if self.arity < 2:
            raise ValueError(f"arity must be >= 2, got {self.arity}")
        alphabet = sorted(set(text))
        leaf = self.leaf_block_len
        if leaf is None:
            leaf = default_leaf_len(len(text), len(alphabet))
        affix = self.affix_len if self.affix_len is not None else leaf
        if leaf < 1:
            raise ValueError("leaf_block_len must be >= 1")
        if affix < 1:
            raise ValueError("affix_len must be >= 1")
        track = self.rank_symbols
        if track is None:
            track = bytes(alphabet) if len(alphabet) <= 4 else b""
        track = bytes(sorted(set(track)))
        stray = set(track) - set(alphabet)
        if stray:
            raise ValueError(f"rank symbols {bytes(sorted(stray))!r} do not occur in the text")
        if self.enable_excess:
            if not set(alphabet) <= set(b"()"):
                raise ValueError("excess needs a text over '(' and ')'")
            track = bytes(sorted(set(track) | (set(b"(") & set(alphabet))))
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        return BuildConfig(self.arity, leaf, affix, track, self.enable_excess,
                           self.hash_seed, self.hash_modulus_bits, self.level_skip,
                           self.max_attempts)


def default_leaf_len(n: int, sigma: int) -> int:
    """max(1, floor(log2 n / log2 sigma)); a unary alphabet counts as binary."""
    if n < 2:
        return 1
    return max(1, int(math.log2(n) / math.log2(max(sigma, 2))))


def child_parts(internal_lengths, arity: int, leaf: int) -> int:
    """Children per internal block on one level.

    Every internal block of a level gets the same count, chosen so the
    shortest one still yields children of at least ``leaf`` symbols.  A common
    count keeps all block sizes of the next level within one of each other.
    """
    shortest = min(internal_lengths, default=0)
    return min(arity, shortest // leaf)


def split_evenly(start: int, length: int, parts: int) -> list[tuple[int, int]]:
    """Cut [start, start+length) into ``parts`` spans, longer ones first."""
    q, rem = divmod(length, parts)
    spans = []
    pos = start
    for k in range(parts):
        size = q + 1 if k < rem else q
        spans.append((pos, size))
        pos += size
    return spans


def symbol_width(sigma: int) -> int:
    """Bits per packed symbol code."""
    return (sigma - 1).bit_length()


@dataclass(eq=False)
class BlockGraph:
    n: int
    alphabet: bytes
    config: BuildConfig
    levels: list[list[Block]]
    z: int
    build_attempts: int = 1

    @property
    def sigma(self) -> int:
        return len(self.alphabet)

    @property
    def arity(self) -> int:
        return self.config.arity

    @property
    def height(self) -> int:
        return len(self.levels)

    @property
    def tracked(self) -> bytes:
        return self.config.rank_symbols

    @cached_property
    def _track_index(self) -> dict[int, int]:
        return {a: k for k, a in enumerate(self.tracked)}

    def track_index(self, symbol) -> int:
        a = as_symbol(symbol)
        try:
            return self._track_index[a]
        except KeyError:
            raise ValueError(f"symbol {bytes([a])!r} is not tracked for rank/select") from None

    @cached_property
    def top_starts(self) -> list[int]:
        return [b.start for b in self.levels[0]]

    def top_index(self, pos: int) -> int:
        """Index of the top-level block containing 0-based ``pos``."""
        return bisect.bisect_right(self.top_starts, pos) - 1

    @cached_property
    def rank_totals(self) -> tuple[int, ...]:
        last = self.levels[0][-1]
        counts = list(last.rank_before)
        for k, a in enumerate(self.tracked):
            counts[k] += _block_count(self, 0, len(self.levels[0]) - 1, last.length, a, k)
        return tuple(counts)

    def blocks(self):
        for depth, level in enumerate(self.levels):
            for idx, b in enumerate(level):
                yield depth, idx, b


def _block_count(graph, depth, idx, k, a, ai):
    # local import keeps graph.py free of query logic at import time
    from .queries import local_rank
    return local_rank(graph, depth, idx, k, a, ai)


def as_symbol(symbol) -> int:
    """Accept an int byte value, a length-1 bytes object or a length-1 str."""
    if isinstance(symbol, int):
        if not 0 <= symbol < 256:
            raise ValueError(f"symbol {symbol} is not a byte value")
        return symbol
    if isinstance(symbol, str):
        symbol = symbol.encode("latin-1")
    if isinstance(symbol, (bytes, bytearray)) and len(symbol) == 1:
        return symbol[0]
    raise ValueError(f"not a single symbol: {symbol!r}")

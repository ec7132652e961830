"""Level-by-level block graph construction.

Each attempt is Monte-Carlo: duplicate detection compares Karp-Rabin
signatures without checking the symbols.  The finished graph is then decoded
and compared with the input; on a mismatch the whole build is redone with a
fresh hash seed, so an accepted graph is always correct.

Marked blocks shorter than twice the leaf length are stored literally.
Longer ones split into a child count shared by the whole level, chosen so
no child is shorter than a leaf.
"""

from __future__ import annotations

import bisect
import hashlib
import logging
from dataclasses import dataclass, field
from itertools import accumulate

from .graph import (BackPointer, Block, BlockGraph, BlockKind, BuildConfig,
                    ExcessAugment, child_parts, split_evenly)
from .karp_rabin import KarpRabinHasher, new_hasher, window_signatures
from .lz77 import parse, phrase_count

log = logging.getLogger(__name__)


class BuildError(RuntimeError):
    pass


class MarkingError(BuildError):
    """A back pointer's source is not covered by marked blocks.

    Only a hash collision can cause this; :func:`build` retries on it.
    """


def _runs(spans):
    """Maximal runs of spans that are contiguous in the text, as (start, stop)."""
    runs = []
    for s, length in spans:
        if runs and runs[-1][1] == s:
            runs[-1][1] = s + length
        else:
            runs.append([s, s + length])
    return [tuple(r) for r in runs]


class _WindowScan:
    """Signatures of all windows of one length inside the covered runs."""

    def __init__(self, text, runs, length, hasher):
        self.run_starts = [s for s, _ in runs]
        self.sigs = [window_signatures(hasher, text, s, e, length) for s, e in runs]
        # earlier runs overwrite later ones, and within a run earlier windows
        # overwrite later ones, so each signature keeps its leftmost start
        self.first: dict[int, int] = {}
        for (s, _), sigs in zip(reversed(runs), reversed(self.sigs)):
            self.first.update(zip(reversed(sigs), range(s + len(sigs) - 1, s - 1, -1)))

    def at(self, pos):
        r = bisect.bisect_right(self.run_starts, pos) - 1
        return self.sigs[r][pos - self.run_starts[r]]


def mark_level(text: bytes, spans, hasher: KarpRabinHasher, scans=None) -> list[bool]:
    """Mark blocks that belong to a pair with no earlier occurrence.

    ``spans`` are the level's (start, length) pairs in text order.  Two blocks
    only form a pair when they are adjacent in the text.  The first block is
    always marked, and the last one too if its content has no earlier
    occurrence.
    """
    runs = _runs(spans)
    if scans is None:
        scans = {}
    marks = [False] * len(spans)

    def scan(length):
        if length not in scans:
            scans[length] = _WindowScan(text, runs, length, hasher)
        return scans[length]

    for k in range(len(spans) - 1):
        (s1, l1), (s2, l2) = spans[k], spans[k + 1]
        if s1 + l1 != s2:
            continue
        sc = scan(l1 + l2)
        if sc.first[sc.at(s1)] == s1:
            marks[k] = marks[k + 1] = True
    if spans:
        marks[0] = True
        s, length = spans[-1]
        sc = scan(length)
        if sc.first[sc.at(s)] >= s:
            marks[-1] = True
    return marks


class _Sums:
    """Prefix counts of tracked symbols and prefix excess over the text."""

    def __init__(self, text, track, with_excess):
        self.counts = [list(accumulate((c == a for c in text), initial=0)) for a in track]
        self.excess = None
        if with_excess:
            self.excess = list(accumulate((1 if c == 40 else -1 for c in text), initial=0))

    def rank(self, pos):
        return tuple(pc[pos] for pc in self.counts)

    def rank_between(self, lo, hi):
        return tuple(pc[hi] - pc[lo] for pc in self.counts)

    def min_excess(self, lo, hi):
        """(min, 0-based offset from lo) of prefix excess of text[lo:j+1], j in [lo, hi)."""
        seg = self.excess[lo + 1:hi + 1]
        m = min(seg)
        return m - self.excess[lo], seg.index(m)

    def augment(self, start, length):
        m, off = self.min_excess(start, start + length)
        return ExcessAugment(self.excess[start + length] - self.excess[start], m, off)


def _make_pointer(spans, marks, index, source, sums) -> BackPointer:
    start, length = spans[index]
    if source >= start:
        raise MarkingError(f"block at {start} has no earlier occurrence")
    t = bisect.bisect_right(spans, (source, float("inf"))) - 1
    if t < 0:
        raise MarkingError("leftmost occurrence not within marked blocks")
    t_start, t_len = spans[t]
    if not source < t_start + t_len or not marks[t]:
        raise MarkingError("leftmost occurrence not within marked blocks")
    offset = source - t_start
    split = min(length, t_len - offset)
    two = split < length
    if two:
        if t + 1 >= len(spans) or not marks[t + 1]:
            raise MarkingError("leftmost occurrence not within marked blocks")
        u_start, u_len = spans[t + 1]
        if u_start != t_start + t_len or length - split > u_len:
            raise MarkingError("leftmost occurrence not within marked blocks")
    head = tail = None
    if sums.excess is not None:
        head = sums.min_excess(source, source + split)
        if two:
            m, off = sums.min_excess(source + split, source + length)
            tail = (m, off + split)
    return BackPointer(t, offset, split, two,
                       sums.rank_between(t_start, source),
                       sums.rank_between(source, source + split),
                       head, tail)


def resolve_back_pointer(text: bytes, spans, marks, index: int, hasher: KarpRabinHasher,
                         track: bytes = b"", enable_excess: bool = False) -> BackPointer:
    """Back pointer for the unmarked block ``spans[index]`` to its leftmost occurrence."""
    start, length = spans[index]
    sc = _WindowScan(text, _runs(spans), length, hasher)
    return _make_pointer(spans, marks, index, sc.first[sc.at(start)],
                         _Sums(text, track, enable_excess))


def _affixes(text, start, length, affix_len):
    k = min(affix_len, length)
    return text[start:start + k], text[start + length - k:start + length]


def _build_levels(text: bytes, cfg: BuildConfig, z: int, hasher, sums) -> list[list[Block]]:
    n = len(text)
    r, leaf, affix = cfg.arity, cfg.leaf_block_len, cfg.affix_len
    excess = sums.excess is not None

    def extras(s, length):
        pre, suf = _affixes(text, s, length, affix)
        return dict(prefix=pre, suffix=suf, rank_before=sums.rank(s),
                    excess=sums.augment(s, length) if excess else None)

    if n <= leaf or n < r:
        return [[Block(0, n, BlockKind.LITERAL, literal=text, **extras(0, n))]]

    top = r * z if cfg.level_skip and n > r * z * leaf else r
    spans = split_evenly(0, n, top)
    levels = []
    while spans:
        scans: dict[int, _WindowScan] = {}
        marks = mark_level(text, spans, hasher, scans)
        runs = None
        blocks = []
        children = []
        parts = child_parts([ln for (_, ln), m in zip(spans, marks) if m and ln >= 2 * leaf],
                            r, leaf)
        for k, (s, length) in enumerate(spans):
            if not marks[k]:
                sc = scans.get(length)
                if sc is None:
                    if runs is None:
                        runs = _runs(spans)
                    sc = scans[length] = _WindowScan(text, runs, length, hasher)
                ptr = _make_pointer(spans, marks, k, sc.first[sc.at(s)], sums)
                blocks.append(Block(s, length, BlockKind.BACK, pointer=ptr, **extras(s, length)))
            elif length < 2 * leaf:
                blocks.append(Block(s, length, BlockKind.LITERAL, literal=text[s:s + length],
                                    **extras(s, length)))
            else:
                blocks.append(Block(s, length, BlockKind.INTERNAL, first_child=len(children),
                                    child_count=parts, **extras(s, length)))
                children.extend(split_evenly(s, length, parts))
        levels.append(blocks)
        spans = children
    return levels


def _attempt_seed(seed: int, attempt: int) -> int:
    if attempt == 0:
        return seed
    digest = hashlib.blake2b(f"{seed}/{attempt}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def build(text: bytes, config: BuildConfig | None = None) -> BlockGraph:
    """Build and verify a block graph for ``text``."""
    if not text:
        raise ValueError("empty text")
    text = bytes(text)
    cfg = (config or BuildConfig()).resolve(text)
    z = phrase_count(parse(text))
    sums = _Sums(text, cfg.rank_symbols, cfg.enable_excess)
    alphabet = bytes(sorted(set(text)))
    for attempt in range(cfg.max_attempts):
        hasher = new_hasher(_attempt_seed(cfg.hash_seed, attempt), cfg.hash_modulus_bits)
        try:
            levels = _build_levels(text, cfg, z, hasher, sums)
        except MarkingError as exc:
            log.debug("attempt %d aborted: %s", attempt + 1, exc)
            continue
        graph = BlockGraph(len(text), alphabet, cfg, levels, z, attempt + 1)
        if verify(graph, text):
            return graph
        log.debug("attempt %d failed verification", attempt + 1)
    raise BuildError("hash collisions persist")


def reconstruct(graph: BlockGraph) -> bytes | None:
    """Decode the text bottom-up from the graph structure alone.

    Returns None when the structure is inconsistent (dangling children,
    pointers to unmarked blocks, wrong lengths or affixes).
    """
    below: list[bytes] | None = None
    for level in reversed(graph.levels):
        content: list[bytes | None] = [None] * len(level)
        for idx, b in enumerate(level):
            if b.kind == BlockKind.LITERAL:
                content[idx] = b.literal
            elif b.kind == BlockKind.INTERNAL:
                if below is None or b.first_child + b.child_count > len(below):
                    return None
                content[idx] = b"".join(below[b.first_child:b.first_child + b.child_count])
        for idx, b in enumerate(level):
            if b.kind != BlockKind.BACK:
                continue
            p = b.pointer
            last = p.target + (1 if p.two_targets else 0)
            if not 0 <= p.target <= last < len(level) or last >= idx:
                return None
            if any(level[t].kind == BlockKind.BACK for t in range(p.target, last + 1)):
                return None
            src = b"".join(content[t] for t in range(p.target, last + 1))
            content[idx] = src[p.offset:p.offset + b.length]
        for b, c in zip(level, content):
            k = min(graph.config.affix_len, b.length)
            if len(c) != b.length or b.prefix != c[:k] or b.suffix != c[len(c) - k:]:
                return None
        below = content
    return b"".join(below)


def verify(graph: BlockGraph, text: bytes) -> bool:
    return reconstruct(graph) == bytes(text)


@dataclass
class SpaceStats:
    n: int
    sigma: int
    z: int
    levels: int
    build_attempts: int
    blocks_per_level: list[int]
    marked_per_level: list[int]
    back_per_level: list[int]
    section_bytes: dict[str, int] = field(default_factory=dict)

    @property
    def total_bytes(self) -> int:
        return sum(self.section_bytes.values())

    @property
    def literal_bits(self) -> int:
        return 8 * self.section_bytes["literals"]

    @property
    def pointer_bits(self) -> int:
        return 8 * self.section_bytes["pointers"]

    @property
    def sample_bits(self) -> int:
        return 8 * self.section_bytes["rank_samples"]

    def as_items(self):
        yield "n", self.n
        yield "sigma", self.sigma
        yield "z", self.z
        yield "levels", self.levels
        yield "build_attempts", self.build_attempts
        yield "blocks_per_level", ",".join(map(str, self.blocks_per_level))
        yield "marked_per_level", ",".join(map(str, self.marked_per_level))
        yield "back_per_level", ",".join(map(str, self.back_per_level))
        for name, size in self.section_bytes.items():
            yield f"bytes_{name}", size
        yield "total_bytes", self.total_bytes


def stats(graph: BlockGraph) -> SpaceStats:
    """Per-level counts plus an exact byte breakdown of the serialized graph."""
    from .storage import section_sizes

    per_level = [len(level) for level in graph.levels]
    backs = [sum(b.kind == BlockKind.BACK for b in level) for level in graph.levels]
    return SpaceStats(graph.n, graph.sigma, graph.z, graph.height, graph.build_attempts,
                      per_level, [a - b for a, b in zip(per_level, backs)], backs,
                      section_sizes(graph))

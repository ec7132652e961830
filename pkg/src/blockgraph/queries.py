"""Access, extract, rank and select on a built :class:`BlockGraph`.

Public positions are 1-based: ``access(g, 1)`` is the first symbol and
``rank(g, a, i)`` counts occurrences of ``a`` in ``S[1..i]``.

Every query descends from the top level.  Internal blocks hand the query to
the child containing the position; a back-pointing leaf translates it into
its first occurrence inside one or two marked blocks on the same level.
"""

from __future__ import annotations

import bisect
from collections import Counter

from .graph import BlockGraph, BlockKind

INTERNAL, LITERAL, BACK = BlockKind.INTERNAL, BlockKind.LITERAL, BlockKind.BACK


class VisitCounter:
    """Instrumentation hook: counts blocks entered and which branches ran."""

    def __init__(self):
        self.visits = 0
        self.branches = Counter()

    def reset(self):
        self.visits = 0


def child_at(b, off: int) -> int:
    """Index (on the next level) of the child of ``b`` holding block offset ``off``."""
    q, rem = divmod(b.length, b.child_count)
    big = q + 1
    if off < rem * big:
        return b.first_child + off // big
    return b.first_child + rem + (off - rem * big) // q


def access(graph: BlockGraph, i: int, counter: VisitCounter | None = None) -> int:
    """S[i] as a byte value."""
    if not 1 <= i <= graph.n:
        raise IndexError(f"position {i} outside [1, {graph.n}]")
    levels = graph.levels
    pos = i - 1
    depth, idx = 0, graph.top_index(pos)
    while True:
        b = levels[depth][idx]
        if counter is not None:
            counter.visits += 1
        kind = b.kind
        if kind == LITERAL:
            return b.literal[pos - b.start]
        if kind == INTERNAL:
            idx = child_at(b, pos - b.start)
            depth += 1
            continue
        p = b.pointer
        t = levels[depth][p.target]
        pos = t.start + p.offset + (pos - b.start)
        idx = p.target if pos < t.start + t.length else p.target + 1


def _piece(graph, lo, hi, counter):
    """S[lo:hi] (0-based) for hi - lo <= affix_len."""
    levels = graph.levels
    depth = 0
    first, last = graph.top_index(lo), graph.top_index(hi - 1)
    while True:
        level = levels[depth]
        if first != last:
            # the range straddles blocks: read it off their affixes
            out = []
            for idx in range(first, last + 1):
                b = level[idx]
                if counter is not None:
                    counter.visits += 1
                if idx == first:
                    out.append(b.suffix[lo - (b.end - len(b.suffix)):])
                elif idx == last:
                    out.append(b.prefix[:hi - b.start])
                else:
                    out.append(b.prefix)
            return b"".join(out)
        b = level[first]
        if counter is not None:
            counter.visits += 1
        off, end = lo - b.start, hi - b.start
        if b.kind == LITERAL:
            return b.literal[off:end]
        pre, suf = b.prefix, b.suffix
        suffix_start = b.length - len(suf)
        if end <= len(pre):
            return pre[off:end]
        if off >= suffix_start:
            return suf[off - suffix_start:end - suffix_start]
        if suffix_start <= len(pre):
            # the two affixes overlap, so together they hold the whole block
            return pre[off:] + suf[len(pre) - suffix_start:end - suffix_start]
        if b.kind == INTERNAL:
            first, last = child_at(b, off), child_at(b, hi - 1 - b.start)
            depth += 1
            continue
        p = b.pointer
        t = level[p.target]
        q = t.start + p.offset
        lo, hi = q + off, q + off + (hi - lo)
        first = p.target if lo < t.end else p.target + 1
        last = p.target if hi <= t.end else p.target + 1


def extract(graph: BlockGraph, i: int, m: int, counter: VisitCounter | None = None) -> bytes:
    """S[i..i+m-1], assembled from pieces of at most affix_len symbols."""
    if m < 0 or i < 1 or i + m - 1 > graph.n:
        raise IndexError(f"window ({i}, {m}) outside [1, {graph.n}]")
    step = graph.config.affix_len
    lo, hi = i - 1, i - 1 + m
    return b"".join(_piece(graph, p, min(p + step, hi), counter) for p in range(lo, hi, step))


def local_rank(graph: BlockGraph, depth: int, idx: int, k: int, a: int, ai: int,
               counter: VisitCounter | None = None) -> int:
    """Occurrences of symbol ``a`` (tracked slot ``ai``) in the first ``k`` symbols of a block."""
    levels = graph.levels
    total = 0
    while k > 0:
        b = levels[depth][idx]
        if counter is not None:
            counter.visits += 1
        kind = b.kind
        if kind == LITERAL:
            return total + b.literal.count(a, 0, k)
        if kind == INTERNAL:
            idx = child_at(b, k - 1)
            depth += 1
            c = levels[depth][idx]
            total += c.rank_before[ai] - b.rank_before[ai]
            k -= c.start - b.start
            continue
        p = b.pointer
        if k == p.split:
            if counter is not None:
                counter.branches["rank_at_split"] += 1
            return total + p.rank_split[ai]
        if k < p.split:
            if counter is not None:
                counter.branches["rank_before_split"] += 1
            total -= p.rank_offset[ai]
            k += p.offset
            idx = p.target
        else:
            if counter is not None:
                counter.branches["rank_after_split"] += 1
            total += p.rank_split[ai]
            k -= p.split
            idx = p.target + 1
    return total


def rank(graph: BlockGraph, a, i: int, counter: VisitCounter | None = None) -> int:
    """Number of occurrences of ``a`` in S[1..i]."""
    ai = graph.track_index(a)
    if not 0 <= i <= graph.n:
        raise IndexError(f"position {i} outside [0, {graph.n}]")
    if i == 0:
        return 0
    idx = graph.top_index(i - 1)
    b = graph.levels[0][idx]
    return b.rank_before[ai] + local_rank(graph, 0, idx, i - b.start, graph.tracked[ai], ai,
                                          counter)


def _local_select(graph, depth, idx, j, a, ai, counter):
    levels = graph.levels
    shift = 0
    while True:
        b = levels[depth][idx]
        if counter is not None:
            counter.visits += 1
        kind = b.kind
        if kind == LITERAL:
            pos = -1
            for _ in range(j):
                pos = b.literal.index(a, pos + 1)
            return shift + pos
        if kind == INTERNAL:
            below = levels[depth + 1]
            base = b.rank_before[ai]
            c = bisect.bisect_left(below, j + base, lo=b.first_child,
                                   hi=b.first_child + b.child_count,
                                   key=lambda blk: blk.rank_before[ai]) - 1
            cb = below[c]
            j -= cb.rank_before[ai] - base
            shift += cb.start - b.start
            depth, idx = depth + 1, c
            continue
        p = b.pointer
        if j <= p.rank_split[ai]:
            if counter is not None:
                counter.branches["select_first_target"] += 1
            j += p.rank_offset[ai]
            shift -= p.offset
            idx = p.target
        else:
            if counter is not None:
                counter.branches["select_second_target"] += 1
            j -= p.rank_split[ai]
            shift += p.split
            idx = p.target + 1


def select(graph: BlockGraph, a, j: int, counter: VisitCounter | None = None) -> int:
    """Position of the j-th occurrence of ``a``."""
    ai = graph.track_index(a)
    if not 1 <= j <= graph.rank_totals[ai]:
        raise ValueError("occurrence does not exist")
    top = graph.levels[0]
    idx = bisect.bisect_left(top, j, key=lambda blk: blk.rank_before[ai]) - 1
    b = top[idx]
    return b.start + 1 + _local_select(graph, 0, idx, j - b.rank_before[ai],
                                       graph.tracked[ai], ai, counter)


"""Excess, range-minimum and LCA queries on balanced-parentheses strings.

'(' counts +1 and ')' counts -1; ``excess(i)`` is the sum over S[1..i].  A
tree node is identified by the 1-based position of its opening parenthesis.

Range minima are found by descending the block graph.  Blocks fully inside
the query range answer from their :class:`~blockgraph.graph.ExcessAugment`;
back-pointing leaves split the range at the pointer's split point and use the
cached head/tail minima when a whole part is covered.  The top level uses a
sparse table over block minima.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

from .builder import build
from .graph import BlockGraph, BlockKind, BuildConfig
from .queries import access, child_at, rank

OPEN, CLOSE = ord("("), ord(")")
LITERAL, INTERNAL = BlockKind.LITERAL, BlockKind.INTERNAL


class UnbalancedError(ValueError):
    pass


def check_balanced(text: bytes) -> None:
    depth = 0
    for pos, c in enumerate(text, 1):
        if c == OPEN:
            depth += 1
        elif c == CLOSE:
            depth -= 1
        else:
            raise UnbalancedError(f"position {pos}: {bytes([c])!r} is not a parenthesis")
        if depth < 0:
            raise UnbalancedError(f"position {pos}: closes an unopened node")
    if depth:
        raise UnbalancedError(f"{depth} unclosed parentheses")


@dataclass(frozen=True)
class NodeHandle:
    open_pos: int


class _SparseMin:
    """Leftmost-argmin sparse table."""

    def __init__(self, values):
        self.values = values
        table = [list(range(len(values)))]
        width = 1
        while 2 * width <= len(values):
            prev = table[-1]
            row = []
            for k in range(len(values) - 2 * width + 1):
                a, b = prev[k], prev[k + width]
                row.append(b if values[b] < values[a] else a)
            table.append(row)
            width *= 2
        self.table = table

    def argmin(self, lo, hi):
        """Leftmost index of the minimum over values[lo..hi]."""
        k = (hi - lo + 1).bit_length() - 1
        a, b = self.table[k][lo], self.table[k][hi - (1 << k) + 1]
        return b if self.values[b] < self.values[a] else a


class BpString:
    """A balanced-parentheses string stored as a block graph with excess data."""

    def __init__(self, graph: BlockGraph):
        if not graph.config.enable_excess:
            raise ValueError("graph was built without excess augmentation")
        self.graph = graph
        self._ai = graph.track_index(OPEN)
        opens = graph.rank_totals[self._ai]
        if 2 * opens != graph.n or min(self._top_values) < 0:
            raise UnbalancedError("graph does not hold a balanced parentheses string")

    @classmethod
    def from_text(cls, text: bytes, config: BuildConfig | None = None) -> "BpString":
        check_balanced(text)
        config = replace(config or BuildConfig(), enable_excess=True, rank_symbols=b"()")
        return cls(build(text, config))

    @property
    def n(self) -> int:
        return self.graph.n

    def _base(self, b) -> int:
        """Excess of the text before block ``b``."""
        return 2 * b.rank_before[self._ai] - b.start

    @cached_property
    def _top_values(self) -> list[int]:
        return [self._base(b) + b.excess.min_prefix for b in self.graph.levels[0]]

    @cached_property
    def _top_table(self) -> _SparseMin:
        return _SparseMin(self._top_values)

    # -- leftmost minimum --------------------------------------------------

    def _block_min(self, depth, idx, lo, hi):
        """(value, position) of the leftmost minimum over [lo, hi] inside one block.

        Values are prefix excess relative to the block start; positions are
        0-based text positions.
        """
        levels = self.graph.levels
        b = levels[depth][idx]
        if lo == b.start and hi == b.end - 1:
            return b.excess.min_prefix, b.start + b.excess.min_offset
        ai = self._ai
        if b.kind == LITERAL:
            run, best, where = 0, None, lo
            lit, s = b.literal, b.start
            for j in range(s, hi + 1):
                run += 1 if lit[j - s] == OPEN else -1
                if j >= lo and (best is None or run < best):
                    best, where = run, j
            return best, where
        if b.kind == INTERNAL:
            below = levels[depth + 1]
            base = self._base(b)
            best = where = None
            for c in range(child_at(b, lo - b.start), child_at(b, hi - b.start) + 1):
                cb = below[c]
                v, p = self._block_min(depth + 1, c, max(lo, cb.start), min(hi, cb.end - 1))
                v += 2 * cb.rank_before[ai] - cb.start - base
                if best is None or v < best:
                    best, where = v, p
            return best, where
        p = b.pointer
        q = levels[depth][p.target].start + p.offset
        olo, ohi = lo - b.start, hi - b.start
        best = off = None
        if olo < p.split:
            e = min(ohi, p.split - 1)
            if olo == 0 and e == p.split - 1:
                best, off = p.excess_head
            else:
                v, pos = self._block_min(depth, p.target, q + olo, q + e)
                best, off = v - (2 * p.rank_offset[ai] - p.offset), pos - q
        if ohi >= p.split:
            s = max(olo, p.split)
            if s == p.split and ohi == b.length - 1:
                v, o = p.excess_tail
            else:
                v, pos = self._block_min(depth, p.target + 1, q + s, q + ohi)
                o = pos - q
            v += 2 * p.rank_split[ai] - p.split
            if best is None or v < best:
                best, off = v, o
        return best, b.start + off

    def min_excess_pos(self, i: int, k: int) -> int:
        """Leftmost j in [i, k] minimising excess(j)."""
        if not 1 <= i <= k <= self.n:
            raise IndexError(f"range [{i}, {k}] outside [1, {self.n}]")
        graph = self.graph
        top = graph.levels[0]
        lo, hi = i - 1, k - 1
        first, last = graph.top_index(lo), graph.top_index(hi)
        fb = top[first]
        if first == last:
            return self._block_min(0, first, lo, hi)[1] + 1
        v, best = self._block_min(0, first, lo, fb.end - 1)
        best_v = v + self._base(fb)
        if last - first > 1:
            t = self._top_table.argmin(first + 1, last - 1)
            if self._top_values[t] < best_v:
                best_v, best = self._top_values[t], top[t].start + top[t].excess.min_offset
        lb = top[last]
        v, p = self._block_min(0, last, lb.start, hi)
        if v + self._base(lb) < best_v:
            best = p
        return best + 1

    # -- backward search -----------------------------------------------------

    def _block_rightmost(self, depth, idx, lo, hi, t):
        """Rightmost position in [lo, hi] whose excess relative to the block start is <= t."""
        levels = self.graph.levels
        b = levels[depth][idx]
        if lo == b.start and hi == b.end - 1 and b.excess.min_prefix > t:
            return None
        ai = self._ai
        if b.kind == LITERAL:
            lit, s = b.literal, b.start
            run, vals = 0, []
            for j in range(s, hi + 1):
                run += 1 if lit[j - s] == OPEN else -1
                vals.append(run)
            for j in range(hi, lo - 1, -1):
                if vals[j - s] <= t:
                    return j
            return None
        if b.kind == INTERNAL:
            below = levels[depth + 1]
            base = self._base(b)
            for c in range(child_at(b, hi - b.start), child_at(b, lo - b.start) - 1, -1):
                cb = below[c]
                shift = 2 * cb.rank_before[ai] - cb.start - base
                res = self._block_rightmost(depth + 1, c, max(lo, cb.start), min(hi, cb.end - 1),
                                            t - shift)
                if res is not None:
                    return res
            return None
        p = b.pointer
        q = levels[depth][p.target].start + p.offset
        olo, ohi = lo - b.start, hi - b.start
        if ohi >= p.split:
            s = max(olo, p.split)
            head_total = 2 * p.rank_split[ai] - p.split
            whole = s == p.split and ohi == b.length - 1
            if not (whole and p.excess_tail[0] + head_total > t):
                res = self._block_rightmost(depth, p.target + 1, q + s, q + ohi, t - head_total)
                if res is not None:
                    return res - q + b.start
        if olo < p.split:
            e = min(ohi, p.split - 1)
            whole = olo == 0 and e == p.split - 1
            if not (whole and p.excess_head[0] > t):
                shift = 2 * p.rank_offset[ai] - p.offset
                res = self._block_rightmost(depth, p.target, q + olo, q + e, t + shift)
                if res is not None:
                    return res - q + b.start
        return None

    def _rightmost_at_most(self, hi, t):
        """Rightmost 0-based j <= hi with excess(j + 1) <= t, or None."""
        graph = self.graph
        top = graph.levels[0]
        last = graph.top_index(hi)
        res = self._block_rightmost(0, last, top[last].start, hi, t - self._base(top[last]))
        if res is not None or last == 0:
            return res
        table, values = self._top_table, self._top_values
        if values[table.argmin(0, last - 1)] > t:
            return None
        lo, up = 0, last - 1  # some block in [lo, last-1] qualifies; find the rightmost
        while lo < up:
            mid = (lo + up + 1) // 2
            if values[table.argmin(mid, last - 1)] <= t:
                lo = mid
            else:
                up = mid - 1
        b = top[lo]
        return self._block_rightmost(0, lo, b.start, b.end - 1, t - self._base(b))

    def enclose(self, x: int) -> int | None:
        """Opening position of the parent of the node opened at ``x`` (None for a root)."""
        depth = excess(self, x)
        if depth <= 1:
            return None
        j = self._rightmost_at_most(x - 2, depth - 2) if x >= 2 else None
        return 1 if j is None else j + 2


def excess(bp: BpString, i: int) -> int:
    if not 0 <= i <= bp.n:
        raise IndexError(f"position {i} outside [0, {bp.n}]")
    return 2 * rank(bp.graph, OPEN, i) - i


def min_excess_pos(bp: BpString, i: int, k: int) -> int:
    return bp.min_excess_pos(i, k)


def _open_pos(bp, node) -> int:
    pos = node.open_pos if isinstance(node, NodeHandle) else node
    if not 1 <= pos <= bp.n or access(bp.graph, pos) != OPEN:
        raise ValueError(f"{pos} is not the opening parenthesis of a node")
    return pos


def lca(bp: BpString, u, v) -> NodeHandle:
    """Lowest common ancestor of two nodes given by their opening positions.

    For u < v, the leftmost minimum of excess over [u, v] is u itself when u
    is an ancestor of v.  Otherwise it is the closing parenthesis of the
    child of the answer that contains u, so the answer is the parent of the
    node opening right after it.
    """
    u, v = _open_pos(bp, u), _open_pos(bp, v)
    if u > v:
        u, v = v, u
    if u == v:
        return NodeHandle(u)
    m = bp.min_excess_pos(u, v)
    if m == u:
        return NodeHandle(u)
    return NodeHandle(bp.enclose(m + 1))

"""Throughput and size comparison against an uncompressed baseline."""

from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass, field, replace

from . import queries
from .builder import build, stats
from .graph import BlockGraph, BuildConfig


class PlainText:
    """Uncompressed baseline: direct indexing, scan rank, scan select."""

    def __init__(self, text: bytes):
        self.text = bytes(text)

    @property
    def size_bytes(self) -> int:
        return len(self.text)

    def access(self, i):
        return self.text[i - 1]

    def rank(self, a, i):
        return self.text.count(a, 0, i)

    def select(self, a, j):
        pos = -1
        for _ in range(j):
            pos = self.text.index(a, pos + 1)
        return pos + 1


@dataclass
class BenchReport:
    n: int
    arity: int
    levels: int
    build_seconds: float
    build_attempts: int
    graph_bytes: int
    plain_bytes: int
    queries: int
    seed: int
    throughput: dict[str, float] = field(default_factory=dict)  # "structure.op" -> queries/s

    def items(self):
        yield "n", self.n
        yield "arity", self.arity
        yield "levels", self.levels
        yield "build_attempts", self.build_attempts
        yield "graph_bytes", self.graph_bytes
        yield "plain_bytes", self.plain_bytes
        yield "queries", self.queries
        yield "seed", self.seed
        yield "build_seconds", f"{self.build_seconds:.4f}"
        for key in sorted(self.throughput):
            yield f"qps.{key}", f"{self.throughput[key]:.1f}"

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.items())

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["key", "value"])
            writer.writerows(self.items())


def _workload(text: bytes, symbol, count: int, seed: int):
    rng = random.Random(seed)
    n = len(text)
    positions = [rng.randint(1, n) for _ in range(count)]
    prefixes = [rng.randint(0, n) for _ in range(count)]
    total = text.count(symbol) if symbol is not None else 0
    occurrences = [rng.randint(1, total) for _ in range(count)] if total else []
    return positions, prefixes, occurrences


def _rate(fn, args) -> float:
    if not args:
        return 0.0
    start = time.perf_counter()
    for a in args:
        fn(*a)
    elapsed = time.perf_counter() - start
    return len(args) / elapsed if elapsed > 0 else float("inf")


def bench(graph: BlockGraph, text: bytes, queries_per_op: int = 1000, seed: int = 0,
          build_seconds: float = 0.0) -> BenchReport:
    """Time access/rank/select on the graph and the baseline over one seeded workload."""
    baseline = PlainText(text)
    symbol = graph.tracked[0] if graph.tracked else None
    positions, prefixes, occurrences = _workload(baseline.text, symbol, queries_per_op, seed)
    report = BenchReport(graph.n, graph.arity, graph.height, build_seconds,
                         graph.build_attempts, stats(graph).total_bytes,
                         baseline.size_bytes, queries_per_op, seed)
    ops = {
        "access": ([(i,) for i in positions], lambda i: queries.access(graph, i),
                   baseline.access),
    }
    if symbol is not None:
        ops["rank"] = ([(symbol, i) for i in prefixes],
                       lambda a, i: queries.rank(graph, a, i), baseline.rank)
        ops["select"] = ([(symbol, j) for j in occurrences],
                         lambda a, j: queries.select(graph, a, j), baseline.select)
    for op, (args, on_graph, on_plain) in ops.items():
        report.throughput[f"graph.{op}"] = _rate(on_graph, args)
        report.throughput[f"plain.{op}"] = _rate(on_plain, args)
    return report


def build_and_bench(text: bytes, config: BuildConfig | None = None,
                    queries_per_op: int = 1000, seed: int = 0) -> BenchReport:
    start = time.perf_counter()
    graph = build(text, config)
    return bench(graph, text, queries_per_op, seed, time.perf_counter() - start)


def arity_sweep(text: bytes, arities=(2, 4, 8, 16), config: BuildConfig | None = None):
    """(arity, levels, graph bytes) for each arity, everything else fixed."""
    config = config or BuildConfig()
    rows = []
    for r in arities:
        g = build(text, replace(config, arity=r))
        rows.append((r, g.height, stats(g).total_bytes))
    return rows

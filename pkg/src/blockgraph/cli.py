"""Command-line front end.

Exit codes: 0 success, 1 usage error (bad flags, out-of-range query
arguments), 2 data or format error (unreadable or corrupt graph file,
unbalanced parentheses, failed verification).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import queries
from .bench import arity_sweep, build_and_bench
from .builder import BuildError, build, stats, verify
from .corpus import generate_corpus
from .excess import BpString, UnbalancedError, check_balanced, lca
from .graph import BuildConfig
from .storage import GraphFormatError, load, save

USAGE, DATA = 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def _symbol(value: str) -> int:
    data = value.encode("latin-1")
    if len(data) != 1:
        raise argparse.ArgumentTypeError(f"expected one symbol, got {value!r}")
    return data[0]


def _add_build_flags(p):
    p.add_argument("--arity", type=int, default=4)
    p.add_argument("--leaf-len", type=int, default=None)
    p.add_argument("--affix-len", type=int, default=None)
    p.add_argument("--track", default=None, help="symbols supporting rank/select, e.g. 'ab'")
    p.add_argument("--excess", action="store_true", help="add excess data (parentheses input)")
    p.add_argument("--no-skip", action="store_true", help="disable the top-level skip")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--modulus-bits", type=int, default=61)


def _config(args) -> BuildConfig:
    if args.arity < 2:
        raise UsageError("--arity must be at least 2")
    for flag in ("leaf_len", "affix_len"):
        value = getattr(args, flag)
        if value is not None and value < 1:
            raise UsageError(f"--{flag.replace('_', '-')} must be positive")
    if not 8 <= args.modulus_bits <= 62:
        raise UsageError("--modulus-bits must be in [8, 62]")
    track = args.track.encode("latin-1") if args.track is not None else None
    return BuildConfig(arity=args.arity, leaf_block_len=args.leaf_len, affix_len=args.affix_len,
                       rank_symbols=track, enable_excess=args.excess, hash_seed=args.seed,
                       hash_modulus_bits=args.modulus_bits, level_skip=not args.no_skip)


def _read_text(path) -> bytes:
    data = Path(path).read_bytes()
    if not data:
        raise UsageError(f"{path}: empty input")
    return data


def _emit_pairs(pairs, out):
    for k, v in pairs:
        out.write(f"{k}={v}\n")


def _write_bytes(data: bytes, out):
    if out is sys.stdout:
        out.flush()
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        out.write(data.decode("latin-1"))


def cmd_build(args, out):
    text = _read_text(args.input)
    config = _config(args)
    if config.enable_excess:
        check_balanced(text)
    graph = build(text, config)
    size = save(graph, args.out)
    _emit_pairs([("output", args.out), ("bytes", size)], out)
    _emit_pairs(stats(graph).as_items(), out)


def cmd_extract(args, out):
    graph = load(args.graph)
    data = queries.extract(graph, args.i, args.m)
    _write_bytes(data, out)
    if args.newline:
        out.write("\n")


def cmd_rank(args, out):
    graph = load(args.graph)
    out.write(f"{queries.rank(graph, args.symbol, args.i)}\n")


def cmd_select(args, out):
    graph = load(args.graph)
    out.write(f"{queries.select(graph, args.symbol, args.j)}\n")


def _bp(path) -> BpString:
    return BpString(load(path))


def cmd_lca(args, out):
    bp = _bp(args.graph)
    out.write(f"{lca(bp, args.u, args.v).open_pos}\n")


def cmd_rmq(args, out):
    bp = _bp(args.graph)
    out.write(f"{bp.min_excess_pos(args.i, args.k)}\n")


def cmd_stats(args, out):
    _emit_pairs(stats(load(args.graph)).as_items(), out)


def cmd_verify(args, out):
    graph = load(args.graph)
    ok = verify(graph, Path(args.text).read_bytes())
    out.write("ok\n" if ok else "mismatch\n")
    return 0 if ok else DATA


def cmd_bench(args, out):
    text = _read_text(args.input)
    config = _config(args)
    if args.queries < 1:
        raise UsageError("--queries must be positive")
    report = build_and_bench(text, config, args.queries, args.seed)
    out.write(report.to_text())
    if args.csv:
        report.write_csv(args.csv)
    if args.sweep:
        for r, levels, size in arity_sweep(text, config=config):
            out.write(f"sweep.r{r}.levels={levels}\nsweep.r{r}.bytes={size}\n")


def cmd_gen(args, out):
    params = {
        "random": lambda: dict(sigma=args.sigma, n=args.n, seed=args.seed),
        "fibonacci": lambda: dict(n=args.n),
        "power": lambda: dict(base=args.base.encode("latin-1"), k=args.k),
        "bp_random_tree": lambda: dict(nodes=args.nodes, seed=args.seed),
    }[args.kind]()
    try:
        data = generate_corpus(args.kind, **params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out:
        Path(args.out).write_bytes(data)
        out.write(f"output={args.out}\nbytes={len(data)}\n")
    else:
        _write_bytes(data, out)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blockgraph", description="Block graphs over repetitive strings.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="build a graph file from a text file")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    _add_build_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("extract", help="print S[i..i+m-1]")
    p.add_argument("graph")
    p.add_argument("i", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--newline", action="store_true")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("rank", help="occurrences of a symbol in S[1..i]")
    p.add_argument("graph")
    p.add_argument("symbol", type=_symbol)
    p.add_argument("i", type=int)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("select", help="position of the j-th occurrence of a symbol")
    p.add_argument("graph")
    p.add_argument("symbol", type=_symbol)
    p.add_argument("j", type=int)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("lca", help="lowest common ancestor of two nodes (opening positions)")
    p.add_argument("graph")
    p.add_argument("u", type=int)
    p.add_argument("v", type=int)
    p.set_defaults(func=cmd_lca)

    p = sub.add_parser("rmq-excess", help="leftmost position of minimum excess in [i, k]")
    p.add_argument("graph")
    p.add_argument("i", type=int)
    p.add_argument("k", type=int)
    p.set_defaults(func=cmd_rmq)

    p = sub.add_parser("stats", help="space accounting of a graph file")
    p.add_argument("graph")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("verify", help="check a graph file against the original text")
    p.add_argument("graph")
    p.add_argument("--text", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="throughput against a plain-array baseline")
    p.add_argument("input")
    p.add_argument("--queries", type=int, default=1000)
    p.add_argument("--csv", default=None)
    p.add_argument("--sweep", action="store_true", help="also report arity 2/4/8/16")
    _add_build_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a generated corpus")
    p.add_argument("kind", choices=["random", "fibonacci", "power", "bp_random_tree"])
    p.add_argument("--sigma", type=int, default=4)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--base", default="ab")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--nodes", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = make_parser().parse_args(argv)
    try:
        return args.func(args, out) or 0
    except (GraphFormatError, UnbalancedError, BuildError) as exc:
        print(f"blockgraph: {exc}", file=sys.stderr)
        return DATA
    except OSError as exc:
        print(f"blockgraph: {exc}", file=sys.stderr)
        return DATA
    except (UsageError, IndexError, ValueError) as exc:
        print(f"blockgraph: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Block graphs: compressed strings with access, extract, rank, select and
excess/LCA queries, sized by the LZ77 parse of the input."""

from .bench import BenchReport, PlainText, arity_sweep, bench
from .builder import BuildError, SpaceStats, build, reconstruct, stats, verify
from .corpus import bp_random_tree, fibonacci, generate_corpus, power, random_text
from .excess import BpString, NodeHandle, UnbalancedError, excess, lca, min_excess_pos
from .graph import BlockGraph, BlockKind, BuildConfig
from .karp_rabin import KarpRabinHasher, hash_window, new_hasher, roll
from .lz77 import Lz77Parse, Lz77Phrase, parse, phrase_count
from .queries import VisitCounter, access, extract, rank, select
from .storage import (BadMagicError, ChecksumError, CorruptGraphError, GraphFormatError,
                      TruncatedError, VersionMismatchError, deserialize, load, save, serialize)

__all__ = [
    "BadMagicError", "BenchReport", "BlockGraph", "BlockKind", "BpString", "BuildConfig",
    "BuildError", "ChecksumError", "CorruptGraphError", "GraphFormatError", "KarpRabinHasher",
    "Lz77Parse", "Lz77Phrase", "NodeHandle", "PlainText", "SpaceStats", "TruncatedError",
    "UnbalancedError", "VersionMismatchError", "VisitCounter", "access", "arity_sweep", "bench",
    "bp_random_tree", "build", "deserialize", "excess", "extract", "fibonacci",
    "generate_corpus", "hash_window", "lca", "load", "min_excess_pos", "new_hasher", "parse",
    "phrase_count", "power", "random_text", "rank", "reconstruct", "roll", "save", "select",
    "serialize", "stats", "verify",
]

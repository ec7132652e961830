"""BGF1 binary format for block graphs.

Layout::

    magic    4 bytes  b"BGF1"
    version  u16 LE
    length   u64 LE   payload size in bytes
    payload  header fields, then six length-prefixed sections
    checksum u64 LE   BLAKE2b-64 of everything before it

Integers inside the payload are unsigned LEB128 varints; signed values are
zigzag-encoded first.  Symbols are stored as codes into the sorted alphabet,
bit-packed at ceil(log2 sigma) bits each.  Block starts, lengths and child
ranges are not stored: they follow from n, the per-level block counts and
the even-split rule.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from .graph import (BackPointer, Block, BlockGraph, BlockKind, BuildConfig,
                    ExcessAugment, child_parts, split_evenly, symbol_width)

MAGIC = b"BGF1"
VERSION = 1
SECTIONS = ("structure", "pointers", "rank_samples", "affixes", "literals", "excess")
_PREAMBLE = struct.Struct("<4sHQ")
_CHECKSUM = 8


class GraphFormatError(ValueError):
    pass


class BadMagicError(GraphFormatError):
    pass


class VersionMismatchError(GraphFormatError):
    pass


class ChecksumError(GraphFormatError):
    pass


class TruncatedError(GraphFormatError):
    pass


class CorruptGraphError(GraphFormatError):
    """Checksum matched but the payload does not describe a valid graph."""


def _checksum(data: bytes) -> bytes:
    return hashlib.blake2b(data, digest_size=_CHECKSUM).digest()


def put_varint(out: bytearray, value: int) -> None:
    if value < 0:
        raise ValueError("varint must be non-negative")
    while value >= 0x80:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)


def zigzag(value: int) -> int:
    return 2 * value if value >= 0 else -2 * value - 1


def unzigzag(value: int) -> int:
    return value >> 1 if not value & 1 else -((value + 1) >> 1)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def varint(self) -> int:
        shift = value = 0
        data = self.data
        while True:
            if self.pos >= len(data):
                raise CorruptGraphError("varint runs past the end of its section")
            byte = data[self.pos]
            self.pos += 1
            value |= (byte & 0x7F) << shift
            if byte < 0x80:
                return value
            shift += 7

    def signed(self) -> int:
        return unzigzag(self.varint())

    def take(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise CorruptGraphError("field runs past the end of its section")
        chunk = self.data[self.pos:self.pos + size]
        self.pos += size
        return chunk


def pack_codes(codes, width: int) -> bytes:
    if width == 0 or len(codes) == 0:
        return b""
    arr = np.asarray(codes, dtype=np.uint16)
    bits = (arr[:, None] >> np.arange(width - 1, -1, -1, dtype=np.uint16)) & 1
    return np.packbits(bits.astype(np.uint8).ravel()).tobytes()


def unpack_codes(data: bytes, count: int, width: int) -> list[int]:
    if width == 0:
        return [0] * count
    if len(data) * 8 < count * width:
        raise CorruptGraphError("packed symbol stream too short")
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))[:count * width]
    weights = 1 << np.arange(width - 1, -1, -1, dtype=np.int64)
    return (bits.reshape(count, width).astype(np.int64) @ weights).tolist()


def _encode(graph: BlockGraph) -> tuple[bytes, dict[str, bytes]]:
    cfg = graph.config
    code = {a: k for k, a in enumerate(graph.alphabet)}
    width = symbol_width(graph.sigma)
    ntrack = len(cfg.rank_symbols)

    head = bytearray()
    for value in (graph.n, graph.sigma):
        put_varint(head, value)
    head += graph.alphabet
    for value in (cfg.arity, cfg.leaf_block_len, cfg.affix_len,
                  int(cfg.level_skip) | int(cfg.enable_excess) << 1, graph.z,
                  zigzag(cfg.hash_seed), cfg.hash_modulus_bits, cfg.max_attempts,
                  graph.build_attempts, ntrack):
        put_varint(head, value)
    head += cfg.rank_symbols
    put_varint(head, graph.height)
    for level in graph.levels:
        put_varint(head, len(level))

    kinds = []
    pointers = bytearray()
    ranks = bytearray()
    affix_codes = []
    literal_codes = []
    excess = bytearray()
    for level in graph.levels:
        prev = [0] * ntrack
        for b in level:
            for k in range(ntrack):
                put_varint(ranks, b.rank_before[k] - prev[k])
            prev = b.rank_before
        for idx, b in enumerate(level):
            kinds.append(int(b.kind))
            if b.kind == BlockKind.LITERAL:
                literal_codes.extend(code[c] for c in b.literal)
            else:
                affix_codes.extend(code[c] for c in b.prefix)
                affix_codes.extend(code[c] for c in b.suffix)
            if b.kind == BlockKind.BACK:
                p = b.pointer
                put_varint(pointers, idx - p.target)
                put_varint(pointers, p.offset)
                for k in range(ntrack):
                    put_varint(ranks, p.rank_offset[k])
                    put_varint(ranks, p.rank_split[k])
            if cfg.enable_excess:
                ex = b.excess
                put_varint(excess, zigzag(ex.total))
                put_varint(excess, zigzag(ex.min_prefix))
                put_varint(excess, ex.min_offset)
                if b.kind == BlockKind.BACK:
                    parts = [b.pointer.excess_head]
                    if b.pointer.two_targets:
                        parts.append(b.pointer.excess_tail)
                    for value, off in parts:
                        put_varint(excess, zigzag(value))
                        put_varint(excess, off)
    sections = {
        "structure": pack_codes(kinds, 2),
        "pointers": bytes(pointers),
        "rank_samples": bytes(ranks),
        "affixes": pack_codes(affix_codes, width),
        "literals": pack_codes(literal_codes, width),
        "excess": bytes(excess),
    }
    return bytes(head), sections


def _assemble(head: bytes, sections: dict[str, bytes]) -> tuple[bytes, int]:
    payload = bytearray(head)
    for name in SECTIONS:
        put_varint(payload, len(sections[name]))
        payload += sections[name]
    body = _PREAMBLE.pack(MAGIC, VERSION, len(payload)) + payload
    framing = len(body) - sum(len(s) for s in sections.values())
    return body + _checksum(body), framing


def serialize(graph: BlockGraph) -> bytes:
    head, sections = _encode(graph)
    return _assemble(head, sections)[0]


def section_sizes(graph: BlockGraph) -> dict[str, int]:
    """Bytes per category; the values sum to ``len(serialize(graph))``."""
    head, sections = _encode(graph)
    _, framing = _assemble(head, sections)
    sizes = {"header": framing}
    sizes.update((name, len(sections[name])) for name in SECTIONS)
    sizes["checksum"] = _CHECKSUM
    return sizes


def deserialize(data: bytes) -> BlockGraph:
    data = bytes(data)
    if len(data) >= 4 and data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}")
    if len(data) < _PREAMBLE.size:
        raise TruncatedError("file shorter than its preamble")
    _, version, length = _PREAMBLE.unpack_from(data)
    if version != VERSION:
        raise VersionMismatchError(f"format version {version}, expected {VERSION}")
    end = _PREAMBLE.size + length
    if len(data) < end + _CHECKSUM:
        raise TruncatedError(f"payload declares {length} bytes, file holds "
                             f"{max(0, len(data) - _PREAMBLE.size - _CHECKSUM)}")
    if len(data) > end + _CHECKSUM:
        raise CorruptGraphError("trailing bytes after checksum")
    if _checksum(data[:end]) != data[end:]:
        raise ChecksumError("checksum mismatch")
    return _decode(data[_PREAMBLE.size:end])


def _decode(payload: bytes) -> BlockGraph:
    rd = _Reader(payload)
    n, sigma = rd.varint(), rd.varint()
    alphabet = rd.take(sigma)
    arity, leaf, affix, flags, z = (rd.varint() for _ in range(5))
    seed = rd.signed()
    bits, max_attempts, attempts, ntrack = (rd.varint() for _ in range(4))
    track = rd.take(ntrack)
    height = rd.varint()
    counts = [rd.varint() for _ in range(height)]
    sections = {}
    for name in SECTIONS:
        sections[name] = rd.take(rd.varint())
    if rd.pos != len(payload):
        raise CorruptGraphError("unexpected bytes after the last section")
    if n < 1 or sigma < 1 or arity < 2 or height < 1:
        raise CorruptGraphError("header values out of range")
    cfg = BuildConfig(arity, leaf, affix, track, bool(flags & 2), seed, bits,
                      bool(flags & 1), max_attempts)
    width = symbol_width(sigma)
    total_blocks = sum(counts)
    kinds = unpack_codes(sections["structure"], total_blocks, 2)
    pointers = _Reader(sections["pointers"])
    ranks = _Reader(sections["rank_samples"])
    excess = _Reader(sections["excess"])

    # lengths of the packed symbol streams follow from the structure
    if height == 1 and counts[0] == 1:
        spans = [(0, n)]
    else:
        spans = split_evenly(0, n, counts[0])
    layout = []
    level_parts = []
    pos = 0
    for depth, count in enumerate(counts):
        if len(spans) != count:
            raise CorruptGraphError(f"level {depth}: {len(spans)} spans for {count} blocks")
        level_kinds = kinds[pos:pos + count]
        pos += count
        layout.append((spans, level_kinds))
        children = []
        internal = [ln for (_, ln), kind in zip(spans, level_kinds) if kind == BlockKind.INTERNAL]
        parts = child_parts(internal, arity, leaf) if leaf >= 1 else 0
        if internal and parts < 2:
            raise CorruptGraphError(f"level {depth}: internal blocks too short to split")
        level_parts.append(parts)
        for (s, length), kind in zip(spans, level_kinds):
            if kind == BlockKind.INTERNAL:
                children.extend(split_evenly(s, length, parts))
            elif kind not in (BlockKind.LITERAL, BlockKind.BACK):
                raise CorruptGraphError(f"unknown block kind {kind}")
        spans = children
    if spans:
        raise CorruptGraphError("internal blocks on the last level")

    n_literal = n_affix = 0
    for spans, level_kinds in layout:
        for (_, length), kind in zip(spans, level_kinds):
            if kind == BlockKind.LITERAL:
                n_literal += length
            else:
                n_affix += 2 * min(affix, length)
    lit_stream = bytes(alphabet[c] for c in unpack_codes(sections["literals"], n_literal, width))
    aff_stream = bytes(alphabet[c] for c in unpack_codes(sections["affixes"], n_affix, width))
    lit_pos = aff_pos = 0

    levels = []
    for (spans, level_kinds), parts in zip(layout, level_parts):
        rank_before = []
        prev = (0,) * ntrack
        for _ in spans:
            prev = tuple(prev[k] + ranks.varint() for k in range(ntrack))
            rank_before.append(prev)
        blocks = []
        next_child = 0
        for idx, ((s, length), kind) in enumerate(zip(spans, level_kinds)):
            kind = BlockKind(kind)
            k = min(affix, length)
            b = Block(s, length, kind, rank_before=rank_before[idx])
            if kind == BlockKind.LITERAL:
                b.literal = lit_stream[lit_pos:lit_pos + length]
                lit_pos += length
                b.prefix, b.suffix = b.literal[:k], b.literal[length - k:]
            else:
                b.prefix = aff_stream[aff_pos:aff_pos + k]
                b.suffix = aff_stream[aff_pos + k:aff_pos + 2 * k]
                aff_pos += 2 * k
            if kind == BlockKind.INTERNAL:
                b.first_child, b.child_count = next_child, parts
                next_child += b.child_count
            if kind == BlockKind.BACK:
                target = idx - pointers.varint()
                offset = pointers.varint()
                if not 0 <= target < idx or offset >= spans[target][1]:
                    raise CorruptGraphError(f"bad back pointer at level {len(levels)}")
                split = min(length, spans[target][1] - offset)
                rank_offset, rank_split = [], []
                for _ in range(ntrack):
                    rank_offset.append(ranks.varint())
                    rank_split.append(ranks.varint())
                b.pointer = BackPointer(target, offset, split, split < length,
                                        tuple(rank_offset), tuple(rank_split))
            if cfg.enable_excess:
                b.excess = ExcessAugment(excess.signed(), excess.signed(), excess.varint())
                if kind == BlockKind.BACK:
                    head = (excess.signed(), excess.varint())
                    tail = None
                    if b.pointer.two_targets:
                        tail = (excess.signed(), excess.varint())
                    b.pointer = BackPointer(*_pointer_fields(b.pointer), head, tail)
            blocks.append(b)
        levels.append(blocks)
    for name, reader in (("pointers", pointers), ("rank_samples", ranks), ("excess", excess)):
        if reader.pos != len(reader.data):
            raise CorruptGraphError(f"unused bytes in section {name}")
    return BlockGraph(n, alphabet, cfg, levels, z, attempts)


def _pointer_fields(p: BackPointer):
    return p.target, p.offset, p.split, p.two_targets, p.rank_offset, p.rank_split


def save(graph: BlockGraph, path) -> int:
    data = serialize(graph)
    with open(path, "wb") as fh:
        fh.write(data)
    return len(data)


def load(path) -> BlockGraph:
    with open(path, "rb") as fh:
        return deserialize(fh.read())

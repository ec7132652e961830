"""Deterministic test corpora: random, Fibonacci words, powers, random trees."""

from __future__ import annotations

import random
import string

LETTERS = string.ascii_lowercase.encode()


def alphabet(sigma: int) -> bytes:
    if not 1 <= sigma <= 256:
        raise ValueError(f"sigma must be in [1, 256], got {sigma}")
    return LETTERS[:sigma] if sigma <= 26 else bytes(range(sigma))


def random_text(sigma: int, n: int, seed: int = 0) -> bytes:
    if n < 0:
        raise ValueError("length must be non-negative")
    symbols = alphabet(sigma)
    rng = random.Random(seed)
    return bytes(rng.choices(symbols, k=n))


def fibonacci(n: int) -> bytes:
    """Prefix of length n of the infinite Fibonacci word abaababaabaab..."""
    if n < 0:
        raise ValueError("length must be non-negative")
    prev, cur = b"a", b"ab"
    while len(cur) < n:
        prev, cur = cur, cur + prev
    return cur[:n]


def power(base: bytes, k: int) -> bytes:
    if k < 0:
        raise ValueError("exponent must be non-negative")
    return bytes(base) * k


def bp_random_tree(nodes: int, seed: int = 0) -> bytes:
    """Balanced parentheses of a random ordered tree (random recursive tree)."""
    if nodes < 1:
        raise ValueError("a tree needs at least one node")
    rng = random.Random(seed)
    children = [[] for _ in range(nodes)]
    for v in range(1, nodes):
        children[rng.randrange(v)].append(v)
    out = bytearray()
    stack = [(0, 0)]
    while stack:
        v, k = stack.pop()
        if k == 0:
            out.append(ord("("))
        if k < len(children[v]):
            stack.append((v, k + 1))
            stack.append((children[v][k], 0))
        else:
            out.append(ord(")"))
    return bytes(out)


def generate_corpus(kind: str, **params) -> bytes:
    """Dispatch by name: random(sigma, n, seed), fibonacci(n), power(base, k),
    bp_random_tree(nodes, seed)."""
    makers = {
        "random": random_text,
        "fibonacci": fibonacci,
        "power": power,
        "bp_random_tree": bp_random_tree,
    }
    try:
        maker = makers[kind]
    except KeyError:
        raise ValueError(f"unknown corpus kind {kind!r}; choose from {sorted(makers)}") from None
    return maker(**params)

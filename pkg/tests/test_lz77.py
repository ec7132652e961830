import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockgraph.corpus import fibonacci, random_text
from blockgraph.lz77 import Lz77Parse, Lz77Phrase, decode, parse, phrase_count, suffix_array
from oracles import lz_greedy


def as_tuples(lz):
    return [(p.start, p.length, p.source) for p in lz.phrases]


def check_greedy(text, lz):
    """Same phrase boundaries as the brute-force parser, and every source really matches."""
    assert [(s, length) for s, length, _ in as_tuples(lz)] == \
        [(s, length) for s, length, _ in lz_greedy(text)]
    for p in lz.phrases:
        if p.length:
            assert p.source < p.start
            for k in range(p.length):
                assert text[p.source - 1 + k] == text[p.start - 1 + k]


def test_single_symbol():
    lz = parse(b"a")
    assert phrase_count(lz) == 1
    assert lz.phrases[0] == Lz77Phrase(1, 0, literal=ord("a"))
    assert decode(lz) == b"a"


def test_abababab():
    lz = parse(b"abababab")
    assert as_tuples(lz) == [(1, 0, None), (2, 0, None), (3, 6, 1)]
    assert decode(lz) == b"abababab"


def test_unary_self_overlap():
    lz = parse(b"a" * 8)
    assert as_tuples(lz) == [(1, 0, None), (2, 7, 1)]
    assert decode(Lz77Parse((Lz77Phrase(1, 0, literal=97), Lz77Phrase(2, 7, 1)), 8)) == b"a" * 8


def test_abracadabra():
    assert phrase_count(parse(b"abracadabra")) == 8


def test_empty_text():
    with pytest.raises(ValueError, match="empty text"):
        parse(b"")


def test_decode_bad_source():
    with pytest.raises(ValueError):
        decode(Lz77Parse((Lz77Phrase(1, 0, literal=97), Lz77Phrase(2, 3, 5)), 4))


def test_suffix_array_sorted():
    text = random_text(3, 300, seed=4)
    sa = suffix_array(text)
    suffixes = [text[i:] for i in sa]
    assert suffixes == sorted(suffixes)


@pytest.mark.parametrize("text", [
    b"abracadabra", b"mississippi", fibonacci(300), random_text(2, 400, 1),
    random_text(26, 400, 2), b"ab" * 100 + b"c", b"z" * 50,
], ids=["abracadabra", "mississippi", "fib", "rand2", "rand26", "periodic", "unary"])
def test_matches_brute_force(text):
    check_greedy(text, parse(text))


@settings(max_examples=150, deadline=None)
@given(st.binary(min_size=1, max_size=120).map(lambda b: bytes(97 + c % 3 for c in b)))
def test_round_trip_and_greedy(text):
    lz = parse(text)
    assert decode(lz) == text
    check_greedy(text, lz)


@settings(max_examples=100, deadline=None)
@given(st.binary(min_size=1, max_size=80))
def test_doubling_adds_at_most_one_phrase(text):
    assert phrase_count(parse(text + text)) <= phrase_count(parse(text)) + 1

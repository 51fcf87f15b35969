from __future__ import annotations

import pytest

from atomedit.extract.diff import atomic_diff, insertion_span
from atomedit.ingest.segment import tokenize
from atomedit.types import EditKind
from oracles import brute_force_diff


def diff(a, b):
    return atomic_diff(tokenize(a), tokenize(b))


def test_running_example():
    d = diff("She died from an illness", "She died in 1949 from an illness")
    assert d.kind is EditKind.INSERTION
    assert d.phrase == "in 1949 "
    assert d.token_index == 2
    assert d.phrase_tokens == ("in", "1949")


def test_long_illness_example():
    d = diff("She died there after a long illness.", "She died there in 1949 after a long illness.")
    assert d.phrase == "in 1949 "
    assert d.token_index == 3


def test_two_separate_insertions_rejected():
    assert diff("a b c", "a X b Y c") is None


def test_canonical_rightmost():
    d = diff("aa", "aaa")
    assert d.byte_span == (2, 3)
    assert d.token_index is None
    assert insertion_span("aa", "aaa") == (2, 3)


def test_deletion_direction():
    d = diff("The old town hall.", "The town hall.")
    assert d.kind is EditKind.DELETION
    assert d.phrase == "old "
    assert d.byte_span == (4, 8)
    assert d.token_index == 1


def test_shift_left_to_token_boundary():
    # canonical span "o no" cuts tokens; the equivalent "non " does not
    d = diff("no no", "no non no")
    assert d.phrase == "non "
    assert d.token_index == 1


def test_insertion_at_end():
    d = diff("It rained.", "It rained heavily.")
    assert d.phrase == " heavily"
    assert d.token_index == 2


def test_identical_and_substitution():
    assert diff("same text", "same text") is None
    assert diff("a cat", "a dog") is None


def test_multibyte_span_is_in_bytes():
    d = diff("Zoë sang.", "Zoë loudly sang.")
    longer = "Zoë loudly sang.".encode()
    assert longer[d.byte_span[0] : d.byte_span[1]].decode() == d.phrase == "loudly "


@pytest.mark.parametrize(
    "a,b",
    [
        ("She died from an illness", "She died in 1949 from an illness"),
        ("no no", "no non no"),
        ("aa", "aaa"),
        ("a b c", "a X b Y c"),
        ("x y.", "x, y."),
        ("Café au lait.", "Café crème au lait."),
    ],
)
def test_agrees_with_brute_force(a, b):
    s, t = tokenize(a), tokenize(b)
    got = atomic_diff(s, t)
    want = brute_force_diff(s, t)
    if want is None:
        assert got is None
    else:
        assert (got.kind, got.phrase, got.byte_span, got.token_index, got.phrase_tokens) == tuple(want.values())

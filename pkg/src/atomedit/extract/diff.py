"""Detect whether two sentences differ by one contiguous inserted/deleted phrase."""

from __future__ import annotations

import os

from ..ingest.segment import tokenize
from ..types import DiffResult, EditKind, Sentence


def _common_prefix(a: str, b: str) -> int:
    return len(os.path.commonprefix([a, b]))


def _common_suffix(a: str, b: str) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[-1 - i] == b[-1 - i]:
        i += 1
    return i


def insertion_span(short: str, long: str) -> tuple[int, int] | None:
    """Character span of the phrase whose insertion turns ``short`` into ``long``.

    The decomposition is canonical: longest common prefix first, then longest
    common suffix of what remains, i.e. the rightmost of all equivalent
    insertion points. None when no single insertion explains the difference.
    """
    if len(long) <= len(short):
        return None
    a = _common_prefix(short, long)
    b = _common_suffix(short[a:], long[a:])
    if a + b != len(short):
        return None
    return a, len(long) - b


def _equivalent_spans(long: str, start: int, end: int):
    """Yield the canonical span, then each equally valid span further left."""
    while True:
        yield start, end
        if start == 0 or long[start - 1] != long[end - 1]:
            return
        start -= 1
        end -= 1


def _token_alignment(longer: Sentence, shorter: Sentence, bstart: int, bend: int) -> int | None:
    """Index of the first phrase token if the byte span covers whole tokens only."""
    inside = []
    for i, (ts, te) in enumerate(longer.byte_offsets):
        if te <= bstart or ts >= bend:
            continue
        if ts < bstart or te > bend:
            return None
        inside.append(i)
    if not inside:
        return None
    first, last = inside[0], inside[-1]
    if list(longer.tokens[:first]) + list(longer.tokens[last + 1 :]) != list(shorter.tokens):
        return None
    return first


def _byte_pos(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


def _diff_one_way(shorter: Sentence, longer: Sentence, kind: EditKind, language: str) -> DiffResult | None:
    span = insertion_span(shorter.text, longer.text)
    if span is None:
        return None
    candidates = []
    for cs, ce in _equivalent_spans(longer.text, *span):
        bs, be = _byte_pos(longer.text, cs), _byte_pos(longer.text, ce)
        idx = _token_alignment(longer, shorter, bs, be)
        candidates.append((cs, ce, bs, be, idx))
        if idx is not None:
            break
    # rightmost token-aligned span wins; otherwise keep the canonical one
    cs, ce, bs, be, idx = candidates[-1] if candidates[-1][4] is not None else candidates[0]
    phrase = longer.text[cs:ce]
    if idx is not None:
        n_tok = len(longer.tokens) - len(shorter.tokens)
        phrase_tokens = tuple(longer.tokens[idx : idx + n_tok])
    else:
        phrase_tokens = tokenize(phrase.strip(), language).tokens if phrase.strip() else ()
    return DiffResult(kind, phrase, (bs, be), idx, phrase_tokens)


def atomic_diff(s: Sentence, t: Sentence, language: str = "en") -> DiffResult | None:
    """Classify the change from ``s`` to ``t`` as one atomic insertion or deletion.

    ``byte_span`` locates the phrase inside the longer sentence. Prefix and
    suffix matching runs on code points, which keeps phrases valid UTF-8 and
    equals byte-level matching on ASCII. If the canonical span cuts through a
    token but an equivalent span further left covers whole tokens (the usual
    case being which side of the phrase a space lands on), that span is used
    and ``token_index`` is set.
    """
    if s.text == t.text:
        return None
    if len(t.text) > len(s.text):
        return _diff_one_way(s, t, EditKind.INSERTION, language)
    if len(s.text) > len(t.text):
        return _diff_one_way(t, s, EditKind.DELETION, language)
    return None

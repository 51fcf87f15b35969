"""Sentence splitting and tokenization."""

from __future__ import annotations

import functools
import re
from importlib import resources
from pathlib import Path

from ..types import Sentence

CODEPOINT_LANGUAGES = frozenset({"ja", "zh"})

_WORD_OR_PUNCT = re.compile(r"\w+|([^\w\s])\1*")
_LATIN_TERMINAL = re.compile(r"[.!?]+[\"')\]»”’]*(?=\s)")
_CJK_TERMINAL = re.compile(r"[。！？]+[」』”’）)]*")
_OPENERS = "\"'(“‘«[¿¡「『"
_LAST_WORD = re.compile(r"(\S+)$")

_IDEOGRAPH_RANGES = (
    (0x3040, 0x30FF),
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xAC00, 0xD7AF),
    (0xF900, 0xFAFF),
    (0x20000, 0x2FFFF),
)


def is_ideograph(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _IDEOGRAPH_RANGES)


@functools.lru_cache(maxsize=None)
def load_abbreviations(language: str, path: str | None = None) -> frozenset[str]:
    """Load an abbreviation list (lower-cased, without the trailing period).

    Lists ship per language under ``atomedit/ingest/abbrev``; ``path`` points at
    a replacement file in the same format. Unknown languages get an empty list.
    """
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        res = resources.files(__package__).joinpath("abbrev", f"{language}.txt")
        if not res.is_file():
            return frozenset()
        text = res.read_text(encoding="utf-8")
    entries = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line.rstrip(".").lower())
    return frozenset(entries)


def abbreviation_list_version(language: str) -> int | None:
    res = resources.files(__package__).joinpath("abbrev", f"{language}.txt")
    if not res.is_file():
        return None
    m = re.search(r"^#\s*version:\s*(\d+)", res.read_text(encoding="utf-8"), re.M)
    return int(m.group(1)) if m else None


def _is_abbreviation(text: str, dot_pos: int, abbrevs: frozenset[str]) -> bool:
    m = _LAST_WORD.search(text, 0, dot_pos)
    if m is None:
        return False
    word = m.group(1).lstrip(_OPENERS)
    if len(word) == 1 and word.isalpha():
        # personal initials: "J. Smith"
        return True
    return word.lower() in abbrevs


def split_sentences(
    text: str, language: str = "en", abbreviations: frozenset[str] | None = None
) -> list[str]:
    """Split plain text into sentences.

    A boundary follows ``.``, ``!`` or ``?`` (plus closing quotes/brackets) when
    whitespace and then an upper-case letter or ideograph come next, unless the
    period ends a listed abbreviation. The full-width terminals ``。！？`` always
    end a sentence. Returned sentences are whitespace-trimmed and non-empty.
    """
    if abbreviations is None:
        abbreviations = load_abbreviations(language)
    cuts = []
    for m in _LATIN_TERMINAL.finditer(text):
        j = m.end()
        n = len(text)
        while j < n and text[j].isspace():
            j += 1
        while j < n and text[j] in _OPENERS:
            j += 1
        if j >= n or not (text[j].isupper() or is_ideograph(text[j])):
            continue
        if m.group(0).startswith(".") and len(m.group(0).rstrip("\"')]»”’")) == 1:
            if _is_abbreviation(text, m.start(), abbreviations):
                continue
        cuts.append(m.end())
    for m in _CJK_TERMINAL.finditer(text):
        cuts.append(m.end())
    out = []
    prev = 0
    for cut in sorted(set(cuts)):
        piece = text[prev:cut].strip()
        if piece:
            out.append(piece)
        prev = cut
    tail = text[prev:].strip()
    if tail:
        out.append(tail)
    return out


def segment_document(
    text: str, language: str = "en", abbreviations: frozenset[str] | None = None
) -> list[str]:
    """Split a stripped document into sentences; line breaks are hard boundaries."""
    out = []
    for line in text.splitlines():
        out.extend(split_sentences(line, language, abbreviations))
    return out


def _byte_positions(text: str) -> list[int]:
    """Byte offset of every character index (plus the end) in the UTF-8 encoding."""
    pos = [0] * (len(text) + 1)
    acc = 0
    for i, ch in enumerate(text):
        pos[i] = acc
        cp = ord(ch)
        acc += 1 if cp < 0x80 else 2 if cp < 0x800 else 3 if cp < 0x10000 else 4
    pos[len(text)] = acc
    return pos


def token_char_spans(text: str, language: str = "en") -> list[tuple[int, int]]:
    if language in CODEPOINT_LANGUAGES:
        return [(i, i + 1) for i, ch in enumerate(text) if not ch.isspace()]
    return [m.span() for m in _WORD_OR_PUNCT.finditer(text)]


def tokenize(sentence: str, language: str = "en") -> Sentence:
    """Tokenize one sentence.

    Space-delimited languages get runs of word characters plus runs of one
    repeated punctuation character (so ``''`` stays one token); Japanese and
    Chinese get one token per non-space code point.
    """
    spans = token_char_spans(sentence, language)
    if sentence.isascii():
        offsets = tuple(spans)
    else:
        pos = _byte_positions(sentence)
        offsets = tuple((pos[a], pos[b]) for a, b in spans)
    tokens = tuple(sentence[a:b] for a, b in spans)
    return Sentence(sentence, tokens, offsets)

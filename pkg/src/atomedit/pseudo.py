"""Simulated insertions built by deleting dependency subtrees from parsed sentences."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, TextIO

from .types import AtomicEdit, EditKind, Sentence

SUBJECT_RELATIONS = frozenset({"nsubj"})
INSERT_MARKER = "<ins>"


class NotTokenAligned(ValueError):
    pass


@dataclass(frozen=True)
class ParsedSentence:
    tokens: tuple[str, ...]
    upos: tuple[str, ...]
    heads: tuple[int, ...]  # 1-based head per token, 0 = root
    deprels: tuple[str, ...]
    xpos: tuple[str, ...] = ()
    sent_id: str = ""


@dataclass(frozen=True)
class ConlluError:
    sent_id: str
    line: int
    message: str


@dataclass(frozen=True)
class SubtreeSpan:
    root_token_index: int  # 0-based
    span: tuple[int, int]  # inclusive, 0-based
    is_subject: bool


def tree_problems(heads: tuple[int, ...]) -> list[str]:
    n = len(heads)
    problems = []
    if any(h < 0 or h > n for h in heads):
        return ["head index out of range"]
    roots = [i for i, h in enumerate(heads) if h == 0]
    if len(roots) != 1:
        problems.append(f"expected one root, found {len(roots)}")
    for start in range(n):
        seen = set()
        node = start
        while heads[node] != 0:
            if node in seen:
                return problems + ["head cycle"]
            seen.add(node)
            node = heads[node] - 1
    return problems


def read_conllu(stream: TextIO | Iterable[str]) -> Iterator[ParsedSentence | ConlluError]:
    """Parse CoNLL-U blocks; bad blocks become :class:`ConlluError` records.

    Multiword-token ranges (``3-4``) and empty nodes (``5.1``) are skipped.
    """
    rows: list[list[str]] = []
    sent_id = ""
    start_line = 0
    bad: str | None = None

    def flush() -> ParsedSentence | ConlluError | None:
        if not rows and bad is None:
            return None
        if bad is not None:
            return ConlluError(sent_id, start_line, bad)
        try:
            heads = tuple(int(r[6]) for r in rows)
        except ValueError:
            return ConlluError(sent_id, start_line, "non-integer HEAD")
        problems = tree_problems(heads)
        if problems:
            return ConlluError(sent_id, start_line, "; ".join(problems))
        return ParsedSentence(
            tokens=tuple(r[1] for r in rows),
            upos=tuple(r[3] for r in rows),
            heads=heads,
            deprels=tuple(r[7] for r in rows),
            xpos=tuple(r[4] for r in rows),
            sent_id=sent_id,
        )

    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip():
            item = flush()
            if item is not None:
                yield item
            rows, sent_id, bad = [], "", None
            continue
        if not rows and not sent_id and bad is None:
            start_line = lineno
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            if key.strip() == "sent_id":
                sent_id = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            bad = bad or f"line {lineno}: expected 10 columns, got {len(cols)}"
            continue
        if "-" in cols[0] or "." in cols[0]:
            continue
        if not cols[0].isdigit() or int(cols[0]) != len(rows) + 1:
            bad = bad or f"line {lineno}: unexpected token id {cols[0]!r}"
            continue
        rows.append(cols)
    item = flush()
    if item is not None:
        yield item


def _children(heads: tuple[int, ...]) -> list[list[int]]:
    kids: list[list[int]] = [[] for _ in heads]
    for i, h in enumerate(heads):
        if h:
            kids[h - 1].append(i)
    return kids


def all_subtree_spans(parse: ParsedSentence) -> list[SubtreeSpan]:
    """Every subtree whose tokens are contiguous on the surface."""
    kids = _children(parse.heads)
    out = []
    for root in range(len(parse.tokens)):
        stack = [root]
        lo = hi = root
        size = 0
        while stack:
            node = stack.pop()
            size += 1
            lo, hi = min(lo, node), max(hi, node)
            stack.extend(kids[node])
        if hi - lo + 1 != size:
            continue
        rel = parse.deprels[root].split(":", 1)[0]
        out.append(SubtreeSpan(root, (lo, hi), rel in SUBJECT_RELATIONS))
    return sorted(out, key=lambda s: (s.span, s.root_token_index))


def _is_punct(parse: ParsedSentence, i: int) -> bool:
    if parse.upos and parse.upos[i] == "PUNCT":
        return True
    return parse.deprels[i].split(":", 1)[0] == "punct"


def subtree_spans(parse: ParsedSentence) -> list[SubtreeSpan]:
    """Subtrees eligible for removal.

    Excludes the whole sentence, subject subtrees and lone punctuation tokens.
    """
    n = len(parse.tokens)
    out = []
    for s in all_subtree_spans(parse):
        lo, hi = s.span
        if s.is_subject or (lo == 0 and hi == n - 1):
            continue
        if lo == hi and _is_punct(parse, lo):
            continue
        out.append(s)
    return out


def pseudo_edit_from_span(
    parse: ParsedSentence, span: SubtreeSpan, language: str = "en", record_id: str = ""
) -> AtomicEdit:
    lo, hi = span.span
    full = Sentence.from_tokens(parse.tokens)
    base_tokens = parse.tokens[:lo] + parse.tokens[hi + 1 :]
    base = Sentence.from_tokens(base_tokens)
    removed = parse.tokens[lo : hi + 1]
    joined = " ".join(removed)
    if hi == len(parse.tokens) - 1:
        phrase = " " + joined
        start = len(base.data)
    else:
        phrase = joined + " "
        start = base.byte_offsets[lo][0]
    end = start + len(phrase.encode("utf-8"))
    return AtomicEdit(
        base_sentence=base,
        edited_sentence=full,
        phrase=phrase,
        phrase_tokens=tuple(removed),
        kind=EditKind.INSERTION,
        byte_span=(start, end),
        token_index=lo,
        language=language,
        article_id=parse.sent_id,
        provenance="pseudo",
        record_id=record_id,
    )


def generate_pseudo_edit(
    parse: ParsedSentence, rng_seed: int | str, language: str = "en", record_id: str = ""
) -> AtomicEdit | None:
    """Remove one uniformly chosen eligible subtree; None if there is none.

    ``rng_seed`` fully determines the choice.
    """
    spans = subtree_spans(parse)
    if not spans:
        return None
    span = random.Random(rng_seed).choice(spans)
    return pseudo_edit_from_span(parse, span, language, record_id)


def generate_pseudo_edits(
    parses: Iterable[ParsedSentence], n: int, seed: int = 0, language: str = "en"
) -> Iterator[AtomicEdit]:
    """Up to ``n`` pseudo-edits, one per sentence per pass over ``parses``.

    Each sentence's seed derives from ``seed``, the pass number and the
    sentence position, so output is stable regardless of how work is split.
    """
    parses = list(parses)
    emitted = 0
    rnd = 0
    while emitted < n:
        produced = 0
        for i, parse in enumerate(parses):
            if emitted >= n:
                return
            sid = parse.sent_id or str(i)
            edit = generate_pseudo_edit(
                parse, f"{seed}:{rnd}:{i}", language, record_id=f"pseudo-{rnd}-{i}-{sid}"
            )
            if edit is None:
                continue
            produced += 1
            emitted += 1
            yield edit
        if not produced:
            return
        rnd += 1


def emit_marked(edit: AtomicEdit) -> str:
    """Shorter sentence's tokens with ``<ins>`` at the insertion index."""
    if edit.token_index is None:
        raise NotTokenAligned(f"edit {edit.record_id} has no token-aligned insertion index")
    toks = list(edit.shorter.tokens)
    toks.insert(edit.token_index, INSERT_MARKER)
    return " ".join(toks)

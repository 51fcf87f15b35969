from __future__ import annotations

from atomedit.extract.diff import atomic_diff
from atomedit.ingest.segment import tokenize
from atomedit.types import AtomicEdit


def make_edit(base: str, edited: str, article_id: str = "A", **kw) -> AtomicEdit:
    s, t = tokenize(base), tokenize(edited)
    d = atomic_diff(s, t)
    assert d is not None, (base, edited)
    return AtomicEdit(
        base_sentence=s,
        edited_sentence=t,
        phrase=d.phrase,
        phrase_tokens=d.phrase_tokens,
        kind=d.kind,
        byte_span=d.byte_span,
        token_index=d.token_index,
        language="en",
        article_id=article_id,
        base_revision_id="1",
        edited_revision_id="2",
        bleu=0.5,
        **kw,
    )

from __future__ import annotations

from ..ingest.dump import Snapshot
from ..types import AtomicEdit
from .align import AlignConfig, align_windowed
from .diff import atomic_diff


def extract_edits(
    pair: tuple[Snapshot, Snapshot], cfg: AlignConfig = AlignConfig(), language: str = "en"
) -> list[AtomicEdit]:
    """All atomic edits between two consecutive snapshots, in base-sentence order."""
    base, edited = pair
    out = []
    seen = set()
    for i, j, score in align_windowed(base.sentences, edited.sentences, cfg):
        s, t = base.sentences[i], edited.sentences[j]
        d = atomic_diff(s, t, language)
        if d is None:
            continue
        key = (s.text, t.text, d.byte_span)
        if key in seen:
            continue
        seen.add(key)
        out.append(
            AtomicEdit(
                base_sentence=s,
                edited_sentence=t,
                phrase=d.phrase,
                phrase_tokens=d.phrase_tokens,
                kind=d.kind,
                byte_span=d.byte_span,
                token_index=d.token_index,
                language=language,
                article_id=base.article_id,
                base_revision_id=base.revision_id,
                edited_revision_id=edited.revision_id,
                bleu=score,
            )
        )
    return out

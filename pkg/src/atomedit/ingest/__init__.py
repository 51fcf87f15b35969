"""Reading revision snapshots and turning them into tokenized sentences."""

from .dump import (
    IngestConfig,
    IngestError,
    RawSnapshot,
    Snapshot,
    build_snapshot,
    group_by_article,
    pair_snapshots,
    read_dump,
    sentence_lines,
)
from .markup import strip_markup
from .segment import load_abbreviations, segment_document, split_sentences, tokenize

__all__ = [
    "IngestConfig",
    "IngestError",
    "RawSnapshot",
    "Snapshot",
    "build_snapshot",
    "group_by_article",
    "load_abbreviations",
    "pair_snapshots",
    "read_dump",
    "segment_document",
    "sentence_lines",
    "split_sentences",
    "strip_markup",
    "tokenize",
]

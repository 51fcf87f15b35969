"""Annotation quality/agreement summaries and phrase-generation metrics."""

from __future__ import annotations

import csv
import json
import math
import os
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, TextIO

import numpy as np

ERROR_LABEL = "ERROR"


class MissingRecordsError(KeyError):
    def __init__(self, missing: Iterable[str]):
        self.missing = sorted(set(missing))
        shown = ", ".join(self.missing[:20])
        more = f" (+{len(self.missing) - 20} more)" if len(self.missing) > 20 else ""
        super().__init__(f"unknown record ids: {shown}{more}")


@dataclass(frozen=True)
class AnnotationRecord:
    record_id: str
    annotator_id: str
    index: int | None  # None means the annotator flagged an error

    @property
    def is_error(self) -> bool:
        return self.index is None


def read_annotations(f: TextIO) -> Iterator[AnnotationRecord]:
    """TSV rows ``record_id  annotator_id  judgment``; judgment is an int or ``ERROR``."""
    for lineno, row in enumerate(csv.reader(f, delimiter="\t"), 1):
        if not row or row[0].startswith("#"):
            continue
        if len(row) != 3:
            raise ValueError(f"line {lineno}: expected 3 columns, got {len(row)}")
        rid, ann, judgment = (c.strip() for c in row)
        if lineno == 1 and judgment == "judgment":
            continue
        if judgment.upper() == ERROR_LABEL:
            yield AnnotationRecord(rid, ann, None)
            continue
        idx = int(judgment)
        if idx < 0:
            raise ValueError(f"line {lineno}: negative insertion index")
        yield AnnotationRecord(rid, ann, idx)


@dataclass
class ErrorSummary:
    no_error: float
    possible_error: float
    clear_error: float
    records: int
    excluded: int = 0

    def to_dict(self) -> dict:
        return {
            "no_error": self.no_error,
            "possible_error": self.possible_error,
            "clear_error": self.clear_error,
            "records": self.records,
            "excluded_without_annotations": self.excluded,
        }


def error_rate_summary(
    annotations: Iterable[AnnotationRecord], record_ids: Iterable[str] | None = None
) -> ErrorSummary:
    """Share of records judged unanimously fine, mixed, or unanimously erroneous.

    Records listed in ``record_ids`` that have no annotations are left out of
    the fractions and reported in ``excluded``.
    """
    by_record: dict[str, list[bool]] = defaultdict(list)
    for a in annotations:
        by_record[a.record_id].append(a.is_error)
    excluded = 0
    if record_ids is not None:
        excluded = len(set(record_ids) - set(by_record))
    no = mixed = clear = 0
    for flags in by_record.values():
        if not any(flags):
            no += 1
        elif all(flags):
            clear += 1
        else:
            mixed += 1
    n = len(by_record)
    if n == 0:
        return ErrorSummary(0.0, 0.0, 0.0, 0, excluded)
    return ErrorSummary(no / n, mixed / n, clear / n, n, excluded)


@dataclass
class AgreementReport:
    per_annotation: float
    per_record: float
    events: int
    records: int
    excluded_unaligned: int

    def to_dict(self) -> dict:
        return {
            "per_annotation": self.per_annotation,
            "per_record": self.per_record,
            "events": self.events,
            "records": self.records,
            "excluded_unaligned": self.excluded_unaligned,
        }


def annotator_agreement(
    annotations: Iterable[AnnotationRecord], gold: Mapping[str, int | None]
) -> AgreementReport:
    """How often an annotator's index equals the editor's token index.

    ``gold`` maps record id to the edit's token index (None for edits that
    are not token-aligned; those are skipped and counted). Error judgments
    count as disagreement. ``per_annotation`` pools every judgment;
    ``per_record`` averages each record's agreement rate.
    """
    annotations = list(annotations)
    missing = {a.record_id for a in annotations if a.record_id not in gold}
    if missing:
        raise MissingRecordsError(missing)
    hits = events = 0
    per_record: dict[str, list[int]] = defaultdict(list)
    skipped = set()
    for a in annotations:
        g = gold[a.record_id]
        if g is None:
            skipped.add(a.record_id)
            continue
        ok = int(a.index is not None and a.index == g)
        hits += ok
        events += 1
        per_record[a.record_id].append(ok)
    rec_rates = [sum(v) / len(v) for v in per_record.values()]
    return AgreementReport(
        hits / events if events else 0.0,
        math.fsum(rec_rates) / len(rec_rates) if rec_rates else 0.0,
        events,
        len(per_record),
        len(skipped),
    )


def normalize_phrase(phrase: str) -> str:
    return " ".join(phrase.split())


def exact_match_at_k(
    proposals: Mapping[str, Sequence[str]], gold: Mapping[str, str], k: int = 10
) -> float:
    """Fraction of records whose gold phrase is among the top ``k`` proposals."""
    if k < 1:
        raise ValueError("k must be >= 1")
    missing = set(proposals) - set(gold)
    if missing:
        raise MissingRecordsError(missing)
    if not proposals:
        return 0.0
    hits = 0
    for rid, ranked in proposals.items():
        target = normalize_phrase(gold[rid])
        hits += any(normalize_phrase(p) == target for p in ranked[:k])
    return hits / len(proposals)


class EmbeddingTable:
    """Word vectors in the common text format (optional ``count dim`` header)."""

    def __init__(self, vectors: Mapping[str, Sequence[float]], dim: int | None = None):
        if dim is None:
            if not vectors:
                raise ValueError("cannot infer dimension of an empty table")
            dim = len(next(iter(vectors.values())))
        if dim <= 0:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self.vectors = {}
        for w, v in vectors.items():
            arr = np.asarray(v, dtype=np.float64)
            if arr.shape != (dim,):
                raise ValueError(f"vector for {w!r} has length {arr.size}, expected {dim}")
            self.vectors[w] = arr

    @classmethod
    def load(cls, path: str | os.PathLike[str]) -> EmbeddingTable:
        vectors: dict[str, list[float]] = {}
        dim = None
        with open(path, encoding="utf-8") as f:
            for i, line in enumerate(f):
                parts = line.rstrip().split(" ")
                if i == 0 and len(parts) == 2 and all(p.isdigit() for p in parts):
                    dim = int(parts[1])
                    continue
                if len(parts) < 2:
                    continue
                vectors[parts[0]] = [float(x) for x in parts[1:]]
        return cls(vectors, dim)

    def phrase_vector(self, phrase: str) -> np.ndarray:
        out = np.zeros(self.dim)
        for w in phrase.split():
            v = self.vectors.get(w)
            if v is not None:
                out += v
        return out


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    c = float(np.dot(u, v)) / (nu * nv)
    return max(-1.0, min(1.0, c))


def similarity_at_1(
    proposals: Mapping[str, Sequence[str]], gold: Mapping[str, str], table: EmbeddingTable
) -> float:
    """Mean cosine between summed word vectors of the top proposal and the gold phrase."""
    missing = set(proposals) - set(gold)
    if missing:
        raise MissingRecordsError(missing)
    sims = [
        cosine(table.phrase_vector(ranked[0]), table.phrase_vector(gold[rid]))
        for rid, ranked in proposals.items()
        if ranked
    ]
    return math.fsum(sims) / len(sims) if sims else 0.0


def read_proposals(f: TextIO) -> dict[str, list[str]]:
    """JSONL ``{"record_id": ..., "phrases": [ranked strings]}``."""
    out = {}
    for line in f:
        if line.strip():
            d = json.loads(line)
            out[str(d["record_id"])] = list(d["phrases"])
    return out

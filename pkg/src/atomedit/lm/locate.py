"""Insertion-point prediction by language-model perplexity."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .kneser_ney import Scorer, perplexity


@dataclass
class LocatePrediction:
    record_id: str
    predicted_index: int
    gold_index: int | None
    perplexities: list[float]
    category: str | None = None

    @property
    def correct(self) -> bool:
        return self.gold_index is not None and self.predicted_index == self.gold_index

    def to_dict(self) -> dict[str, Any]:
        return {
            "record_id": self.record_id,
            "predicted_index": self.predicted_index,
            "gold_index": self.gold_index,
            "category": self.category,
            "perplexities": self.perplexities,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> LocatePrediction:
        return cls(
            d["record_id"],
            int(d["predicted_index"]),
            d.get("gold_index"),
            list(d.get("perplexities", [])),
            d.get("category"),
        )


def candidates(base_tokens: Sequence[str], phrase_tokens: Sequence[str]) -> list[list[str]]:
    base = list(base_tokens)
    phrase = list(phrase_tokens)
    return [base[:i] + phrase + base[i:] for i in range(len(base) + 1)]


def locate(
    model: Scorer,
    base_tokens: Sequence[str],
    phrase_tokens: Sequence[str],
    gold_index: int | None = None,
    record_id: str = "",
    category: str | None = None,
) -> LocatePrediction:
    """Try the phrase at every gap of the base sentence; pick the lowest perplexity.

    Ties go to the smallest index.
    """
    if not base_tokens or not phrase_tokens:
        raise ValueError("base and phrase must both be non-empty")
    ppl = [perplexity(model, cand) for cand in candidates(base_tokens, phrase_tokens)]
    best = min(range(len(ppl)), key=lambda i: (ppl[i], i))
    return LocatePrediction(record_id, best, gold_index, ppl, category)


@dataclass
class AccuracyReport:
    accuracy: float
    n: int
    by_category: dict[str, dict[str, float]] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"accuracy": self.accuracy, "n": self.n, "by_category": self.by_category}


def eval_accuracy(predictions: Iterable[LocatePrediction]) -> AccuracyReport:
    """Exact-match accuracy, overall and per category label where present."""
    n = hits = 0
    cat_n: dict[str, int] = defaultdict(int)
    cat_hits: dict[str, int] = defaultdict(int)
    for p in predictions:
        if p.gold_index is None:
            raise ValueError(f"prediction {p.record_id!r} has no gold index")
        n += 1
        hits += p.correct
        if p.category:
            cat_n[p.category] += 1
            cat_hits[p.category] += p.correct
    by_cat = {
        c: {"accuracy": cat_hits[c] / cat_n[c], "n": cat_n[c]} for c in sorted(cat_n)
    }
    return AccuracyReport(hits / n if n else 0.0, n, by_cat)

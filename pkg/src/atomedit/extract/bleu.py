"""Single-reference sentence BLEU."""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence


class NgramProfile:
    """Pre-counted n-grams of one token sequence, reusable across many BLEU calls."""

    __slots__ = ("length", "counts")

    def __init__(self, tokens: Sequence[str], max_order: int = 4):
        toks = tuple(tokens)
        self.length = len(toks)
        self.counts = [
            Counter(toks[i : i + n] for i in range(len(toks) - n + 1))
            for n in range(1, max_order + 1)
        ]


def bleu_from_profiles(cand: NgramProfile, ref: NgramProfile, max_order: int = 4) -> float:
    """BLEU of ``cand`` against ``ref``.

    Modified precisions for n >= 2 get add-one smoothing on both numerator and
    denominator; unigram precision is left exact, so zero unigram overlap
    (or an empty side) scores 0.
    """
    if cand.length == 0 or ref.length == 0:
        return 0.0
    log_sum = 0.0
    for n in range(max_order):
        cc = cand.counts[n]
        rc = ref.counts[n]
        if len(cc) <= len(rc):
            matches = sum(min(c, rc[g]) for g, c in cc.items() if g in rc)
        else:
            matches = sum(min(c, cc[g]) for g, c in rc.items() if g in cc)
        total = max(cand.length - n, 0)
        if n == 0:
            if matches == 0:
                return 0.0
            log_sum += math.log(matches / total)
        else:
            log_sum += math.log((matches + 1) / (total + 1))
    bp = 1.0 if cand.length >= ref.length else math.exp(1.0 - ref.length / cand.length)
    return bp * math.exp(log_sum / max_order)


def sentence_bleu(candidate: Sequence[str], reference: Sequence[str], max_order: int = 4) -> float:
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    return bleu_from_profiles(
        NgramProfile(candidate, max_order), NgramProfile(reference, max_order), max_order
    )

"""Sentence alignment between two snapshots of one article."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from ..types import Sentence
from .bleu import NgramProfile, bleu_from_profiles

FULL_ALIGN_LIMIT = 10**6


class AlignmentTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class AlignConfig:
    window_k: int = 5
    bleu_max_order: int = 4
    min_bleu: float = 0.1

    def __post_init__(self) -> None:
        if self.window_k < 0:
            raise ValueError("window_k must be >= 0")
        if self.bleu_max_order < 1:
            raise ValueError("bleu_max_order must be >= 1")
        if not 0.0 <= self.min_bleu <= 1.0:
            raise ValueError("min_bleu must lie in [0, 1]")


class AlignedPair(NamedTuple):
    i: int
    j: int
    bleu: float


def _align(
    base: Sequence[Sentence], edited: Sequence[Sentence], cfg: AlignConfig, window: int | None
) -> list[AlignedPair]:
    if not base or not edited:
        return []
    order = cfg.bleu_max_order
    bprof = [NgramProfile(s.tokens, order) for s in base]
    eprof = [NgramProfile(s.tokens, order) for s in edited]
    m = len(edited)
    out = []
    for i, src in enumerate(base):
        if window is None:
            lo, hi = 0, m - 1
        else:
            lo, hi = max(0, i - window), min(m - 1, i + window)
        best_key = None
        best_j = -1
        best = 0.0
        for j in range(lo, hi + 1):
            score = bleu_from_profiles(bprof[i], eprof[j], order)
            # higher BLEU, then smaller displacement, then smaller j
            key = (-score, abs(j - i), j)
            if best_key is None or key < best_key:
                best_key, best_j, best = key, j, score
        if best_j < 0 or best < cfg.min_bleu:
            continue
        if src.text == edited[best_j].text:
            continue
        out.append(AlignedPair(i, best_j, best))
    return out


def align_windowed(
    base: Sequence[Sentence], edited: Sequence[Sentence], cfg: AlignConfig = AlignConfig()
) -> list[AlignedPair]:
    """Match each base sentence to its best-BLEU edited sentence within ``±window_k``.

    Identical best matches are dropped, as are matches scoring below
    ``cfg.min_bleu``. Cost is O(n·k) BLEU evaluations.
    """
    return _align(base, edited, cfg, cfg.window_k)


def align_full(
    base: Sequence[Sentence], edited: Sequence[Sentence], cfg: AlignConfig = AlignConfig()
) -> list[AlignedPair]:
    """Quadratic reference version of :func:`align_windowed` (no window)."""
    if len(base) * len(edited) > FULL_ALIGN_LIMIT:
        raise AlignmentTooLarge(
            f"{len(base)}x{len(edited)} sentence pairs exceeds the limit of {FULL_ALIGN_LIMIT}"
        )
    return _align(base, edited, cfg, None)

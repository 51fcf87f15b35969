"""Sentence alignment and atomic-edit detection."""

from .align import AlignConfig, AlignedPair, AlignmentTooLarge, align_full, align_windowed
from .bleu import NgramProfile, sentence_bleu
from .diff import atomic_diff, insertion_span
from .pipeline import extract_edits

__all__ = [
    "AlignConfig",
    "AlignedPair",
    "AlignmentTooLarge",
    "NgramProfile",
    "align_full",
    "align_windowed",
    "atomic_diff",
    "extract_edits",
    "insertion_span",
    "sentence_bleu",
]

"""Minimal ARPA back-off reader written independently of the exporter."""

from __future__ import annotations

import re


class ArpaModel:
    def __init__(self, lines):
        self.prob: dict[tuple[str, ...], float] = {}
        self.backoff: dict[tuple[str, ...], float] = {}
        self.counts: dict[int, int] = {}
        order = 0
        for raw in lines:
            line = raw.strip()
            if not line or line in ("\\data\\", "\\end\\"):
                continue
            m = re.match(r"ngram (\d+)=(\d+)", line)
            if m:
                self.counts[int(m.group(1))] = int(m.group(2))
                continue
            m = re.match(r"\\(\d+)-grams:", line)
            if m:
                order = int(m.group(1))
                continue
            parts = line.split("\t")
            words = tuple(parts[1].split(" "))
            assert len(words) == order
            self.prob[words] = float(parts[0])
            if len(parts) > 2:
                self.backoff[words] = float(parts[2])
        self.order = max(self.counts)

    def log10_prob(self, word: str, context: tuple[str, ...]) -> float:
        context = context[-(self.order - 1) :] if self.order > 1 else ()
        if context + (word,) in self.prob:
            return self.prob[context + (word,)]
        if not context:
            raise KeyError(word)
        return self.backoff.get(context, 0.0) + self.log10_prob(word, context[1:])

"""Interpolated Kneser-Ney n-gram language model."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

import numpy as np

BOS, EOS, UNK = "<s>", "</s>", "<unk>"
BOS_ID, EOS_ID, UNK_ID = 0, 1, 2
RESERVED = (BOS, EOS, UNK)


class EmptyCorpusError(ValueError):
    pass


class Scorer(Protocol):
    """Anything that can score a token sequence; ``locate`` only needs this."""

    def log_prob(self, tokens: Sequence[str]) -> float: ...


@dataclass
class _Context:
    total: int  # sum of the level's counts over all following words
    types: int  # number of distinct following words
    counts: dict[int, int]


@dataclass
class NGramModel:
    """Interpolated Kneser-Ney with one absolute discount per level.

    ``counts[k-1]`` holds raw k-gram counts over id tuples, taken at every
    predicted position of the BOS-padded training sentences. The
    probabilities use, per level k and context h::

        p_k(w|h) = max(a(hw) - D_k, 0) / A(h) + D_k * T(h) / A(h) * p_{k-1}(w|h[1:])

    where ``a`` is the raw count at the top level and for contexts starting
    with BOS, and the continuation count N1+(. h w) otherwise; ``A`` and ``T``
    are the sum and the number of non-zero ``a(h .)``. Unseen contexts fall
    straight through to the lower level. The unigram level interpolates with a
    uniform distribution over the vocabulary (UNK and EOS included, BOS
    excluded), so every word has positive probability.
    """

    order: int
    vocabulary: dict[str, int]
    counts: list[dict[tuple[int, ...], int]]
    discounts: tuple[float, ...]
    unk_threshold: int = 0
    _levels: list[dict[tuple[int, ...], _Context]] = field(default_factory=list, init=False, repr=False)
    _unigram: np.ndarray = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if len(self.discounts) != self.order:
            raise ValueError("need one discount per level")
        if any(not 0.0 < d < 1.0 for d in self.discounts):
            raise ValueError("discounts must lie in (0, 1)")
        self.id_to_token = [None] * len(self.vocabulary)
        for tok, i in self.vocabulary.items():
            self.id_to_token[i] = tok
        self._build()

    @property
    def vocab_size(self) -> int:
        """Number of predictable words (everything but BOS)."""
        return len(self.vocabulary) - 1

    @property
    def continuation_counts(self) -> list[dict[tuple[int, ...], int]]:
        """The adjusted count a(g) actually used for every n-gram, per level."""
        out = []
        for k in range(1, self.order + 1):
            level = {}
            for h, ctx in self._levels[k].items():
                for w, a in ctx.counts.items():
                    level[h + (w,)] = a
            out.append(level)
        return out

    def _adjusted(self, k: int) -> Counter:
        n = self.order
        if k == n:
            return Counter(self.counts[k - 1])
        adj: Counter = Counter()
        for g in self.counts[k]:  # (k+1)-gram types
            adj[g[1:]] += 1
        for g, c in self.counts[k - 1].items():
            if g[0] == BOS_ID:
                adj[g] = c
        return adj

    def _build(self) -> None:
        n = self.order
        self._levels = [dict() for _ in range(n + 1)]
        for k in range(1, n + 1):
            level = self._levels[k]
            for g, a in sorted(self._adjusted(k).items()):
                h, w = g[:-1], g[-1]
                ctx = level.get(h)
                if ctx is None:
                    ctx = level[h] = _Context(0, 0, {})
                ctx.counts[w] = a
                ctx.total += a
                ctx.types += 1
        V = self.vocab_size
        p = np.zeros(len(self.vocabulary))
        root = self._levels[1].get(())
        d = self.discounts[0]
        if root is None or root.total == 0:
            p[1:] = 1.0 / V
        else:
            p[1:] = d * root.types / root.total / V
            for w, a in root.counts.items():
                p[w] += max(a - d, 0.0) / root.total
        p[BOS_ID] = 0.0
        self._unigram = p

    def token_id(self, token: str) -> int:
        i = self.vocabulary.get(token, UNK_ID)
        return UNK_ID if i == BOS_ID else i

    def prob_ids(self, word: int, context: Sequence[int]) -> float:
        """p(word | context) with ``context`` holding at least ``order - 1`` ids."""
        p = float(self._unigram[word])
        for k in range(2, self.order + 1):
            h = tuple(context[len(context) - (k - 1) :])
            ctx = self._levels[k].get(h)
            if ctx is None:
                continue
            d = self.discounts[k - 1]
            a = ctx.counts.get(word, 0)
            p = (max(a - d, 0.0) + d * ctx.types * p) / ctx.total
        return p

    def prob(self, word: str, context: Sequence[str] = ()) -> float:
        ids = [self.token_id(t) if t != BOS else BOS_ID for t in context]
        ids = [BOS_ID] * max(0, self.order - 1 - len(ids)) + ids
        return self.prob_ids(self.token_id(word), ids)

    def distribution(self, context: Sequence[int]) -> np.ndarray:
        """The whole next-word distribution for an id context (index = id)."""
        p = self._unigram.copy()
        for k in range(2, self.order + 1):
            h = tuple(context[len(context) - (k - 1) :])
            ctx = self._levels[k].get(h)
            if ctx is None:
                continue
            d = self.discounts[k - 1]
            p *= d * ctx.types / ctx.total
            for w, a in ctx.counts.items():
                p[w] += max(a - d, 0.0) / ctx.total
        return p

    def contexts(self, k: int) -> list[tuple[int, ...]]:
        """Observed contexts (length ``k - 1``) at level ``k``."""
        return list(self._levels[k])

    def encode(self, tokens: Sequence[str]) -> list[int]:
        return [self.token_id(t) for t in tokens]

    def log_prob(self, tokens: Sequence[str]) -> float:
        ids = [BOS_ID] * (self.order - 1) + self.encode(tokens) + [EOS_ID]
        total = 0.0
        for i in range(self.order - 1, len(ids)):
            total += math.log(self.prob_ids(ids[i], ids[:i]))
        return total

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NGramModel):
            return NotImplemented
        return (
            self.order == other.order
            and self.vocabulary == other.vocabulary
            and self.counts == other.counts
            and self.discounts == other.discounts
            and self.unk_threshold == other.unk_threshold
        )


def train(
    corpus: Iterable[Sequence[str]],
    order: int = 3,
    discount: float | Sequence[float] = 0.75,
    unk_threshold: int = 2,
) -> NGramModel:
    """Count a corpus of token sequences into an :class:`NGramModel`.

    Tokens seen fewer than ``unk_threshold`` times become UNK.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    sentences = [list(s) for s in corpus]
    freq = Counter(t for s in sentences for t in s)
    if not freq:
        raise EmptyCorpusError("cannot train a language model on an empty corpus")
    kept = sorted(t for t, c in freq.items() if c >= unk_threshold and t not in RESERVED)
    vocab = {BOS: BOS_ID, EOS: EOS_ID, UNK: UNK_ID}
    for t in kept:
        vocab[t] = len(vocab)
    counts: list[Counter] = [Counter() for _ in range(order)]
    pad = [BOS_ID] * (order - 1)
    for s in sentences:
        ids = pad + [vocab.get(t, UNK_ID) for t in s] + [EOS_ID]
        for i in range(order - 1, len(ids)):
            for k in range(1, order + 1):
                counts[k - 1][tuple(ids[i - k + 1 : i + 1])] += 1
    if isinstance(discount, (int, float)):
        discounts = (float(discount),) * order
    else:
        discounts = tuple(float(d) for d in discount)
    return NGramModel(order, vocab, [dict(c) for c in counts], discounts, unk_threshold)


def log_prob(model: Scorer, tokens: Sequence[str]) -> float:
    return model.log_prob(tokens)


def perplexity(model: Scorer, tokens: Sequence[str]) -> float:
    """exp of the mean negative log-probability over tokens plus EOS."""
    return math.exp(-model.log_prob(tokens) / (len(tokens) + 1))


@dataclass(frozen=True)
class UniformModel:
    """Every word (and EOS) equally likely among ``vocab_size`` outcomes."""

    vocab_size: int

    def log_prob(self, tokens: Sequence[str]) -> float:
        return -(len(tokens) + 1) * math.log(self.vocab_size)


@dataclass(frozen=True)
class ConstantScorer:
    """Scores every sequence the same; the degenerate control for ``locate``."""

    value: float = 0.0

    def log_prob(self, tokens: Sequence[str]) -> float:
        return self.value

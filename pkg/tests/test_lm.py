from __future__ import annotations

import io
import math
import random

import numpy as np
import pytest

from atomedit.lm import (
    BOS,
    EOS,
    UNK,
    ConstantScorer,
    EmptyCorpusError,
    ModelFormatError,
    UniformModel,
    load_model,
    perplexity,
    save_model,
    train,
    write_arpa,
)
from arpa_reader import ArpaModel


def toy_corpus(n=300, seed=3):
    rng = random.Random(seed)
    words = "the a cat dog sat ran on under mat rug quickly".split()
    return [[rng.choice(words) for _ in range(rng.randint(1, 8))] for _ in range(n)]


def test_unigram_golden():
    # four one-word sentences: a:4, </s>:4
    m = train([["a"], ["a"], ["a"], ["a"]], order=1, unk_threshold=0)
    n, d, v = 8, 0.75, 3  # a:4, </s>:4; predictable vocab {</s>, <unk>, a}
    floor = d * 2 / n / v
    assert m.prob("a") == pytest.approx((4 - d) / n + floor, abs=1e-15)
    assert m.prob(EOS) == pytest.approx((4 - d) / n + floor, abs=1e-15)
    assert m.prob(UNK) == pytest.approx(floor, abs=1e-15)


def test_unigram_golden_single_sentence():
    m = train([["a", "a", "a", "a"]], order=1, unk_threshold=0)
    # a:4, </s>:1, N=5, V=3
    assert m.prob("a") == pytest.approx(0.75, abs=1e-15)
    assert m.prob(EOS) == pytest.approx(0.15, abs=1e-15)
    assert m.prob(UNK) == pytest.approx(0.10, abs=1e-15)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_normalized(order):
    m = train(toy_corpus(), order=order)
    for k in range(order):
        for ctx in m.contexts(k)[:50]:
            assert float(np.sum(m.distribution(ctx))) == pytest.approx(1.0, abs=1e-12)


def test_bos_never_predicted_and_unk_mapped():
    m = train(toy_corpus(), order=3)
    for ctx in m.contexts(3)[:20]:
        assert m.distribution(ctx)[m.vocabulary[BOS]] == 0.0
    assert m.prob(BOS, ("the",)) == m.prob(UNK, ("the",))
    assert m.prob("never-seen-word", ("the",)) == m.prob(UNK, ("the",))
    assert m.prob(EOS, ("the", "cat")) > 0


def test_empty_corpus():
    with pytest.raises(EmptyCorpusError):
        train([], order=3)
    with pytest.raises(EmptyCorpusError):
        train([[]], order=3)


def test_binary_round_trip(tmp_path):
    m = train(toy_corpus(), order=3)
    path = tmp_path / "m.bin"
    save_model(m, path)
    back = load_model(path)
    assert back == m
    assert back.prob("cat", ("the",)) == m.prob("cat", ("the",))


def test_corrupt_binary(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOTAMODEL")
    with pytest.raises(ModelFormatError):
        load_model(path)
    m = train(toy_corpus(), order=2)
    save_model(m, path)
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(ModelFormatError):
        load_model(path)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_arpa_round_trip(order):
    m = train(toy_corpus(), order=order)
    buf = io.StringIO()
    write_arpa(m, buf)
    arpa = ArpaModel(buf.getvalue().splitlines())
    rng = random.Random(0)
    vocab = [w for w in m.vocabulary if w != BOS]
    for _ in range(300):
        lead = rng.randint(0, order - 1)
        ctx = (BOS,) * lead + tuple(rng.choice(vocab) for _ in range(order - 1 - lead))
        w = rng.choice(vocab)
        assert arpa.log10_prob(w, ctx) == pytest.approx(math.log10(m.prob(w, ctx)), abs=1e-4)


def test_perplexity_and_controls():
    m = train(toy_corpus(), order=3)
    assert perplexity(m, ["the", "cat", "sat"]) < perplexity(m, ["mat", "quickly", "quickly"])
    u = UniformModel(10)
    assert perplexity(u, ["x", "y"]) == pytest.approx(10.0)
    assert perplexity(ConstantScorer(), ["a", "b"]) == perplexity(ConstantScorer(), ["c"])

"""Binary persistence and ARPA export for :class:`NGramModel`.

Binary layout, all little-endian::

    magic     8 bytes  b"ATOMEDLM"
    version   u32      (1)
    order     u32
    unk_thr   u32
    discounts f64 * order
    n_vocab   u32, then n_vocab x (u32 byte length, UTF-8 bytes), in id order
    per level k = 1..order:
        n_entries u64, then n_entries x (k x u32 ids, u64 raw count), sorted
"""

from __future__ import annotations

import math
import os
import struct
from typing import BinaryIO, TextIO

from .kneser_ney import BOS_ID, NGramModel

MAGIC = b"ATOMEDLM"
VERSION = 1


class ModelFormatError(ValueError):
    pass


def _write_model(f: BinaryIO, model: NGramModel) -> None:
    f.write(MAGIC)
    f.write(struct.pack("<III", VERSION, model.order, model.unk_threshold))
    f.write(struct.pack(f"<{model.order}d", *model.discounts))
    f.write(struct.pack("<I", len(model.id_to_token)))
    for tok in model.id_to_token:
        raw = tok.encode("utf-8")
        f.write(struct.pack("<I", len(raw)))
        f.write(raw)
    for k in range(1, model.order + 1):
        entry = struct.Struct(f"<{k}IQ")
        level = model.counts[k - 1]
        f.write(struct.pack("<Q", len(level)))
        f.write(b"".join(entry.pack(*g, c) for g, c in sorted(level.items())))


def save_model(model: NGramModel, path: str | os.PathLike[str]) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as f:
        _write_model(f, model)
    os.replace(tmp, path)


def _read_exact(f: BinaryIO, n: int) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise ModelFormatError("truncated model file")
    return data


def load_model(path: str | os.PathLike[str]) -> NGramModel:
    with open(path, "rb") as f:
        if _read_exact(f, 8) != MAGIC:
            raise ModelFormatError(f"{path}: not an atomedit language model")
        version, order, unk_threshold = struct.unpack("<III", _read_exact(f, 12))
        if version != VERSION:
            raise ModelFormatError(f"{path}: unsupported model version {version}")
        discounts = struct.unpack(f"<{order}d", _read_exact(f, 8 * order))
        (n_vocab,) = struct.unpack("<I", _read_exact(f, 4))
        vocab = {}
        for i in range(n_vocab):
            (n,) = struct.unpack("<I", _read_exact(f, 4))
            vocab[_read_exact(f, n).decode("utf-8")] = i
        counts = []
        for k in range(1, order + 1):
            (n_entries,) = struct.unpack("<Q", _read_exact(f, 8))
            entry = struct.Struct(f"<{k}IQ")
            blob = _read_exact(f, entry.size * n_entries)
            counts.append({tuple(row[:k]): row[k] for row in entry.iter_unpack(blob)})
        if f.read(1):
            raise ModelFormatError(f"{path}: trailing bytes after model")
    return NGramModel(order, vocab, counts, tuple(discounts), unk_threshold)


def _log10(p: float) -> float:
    return math.log10(p) if p > 0 else -99.0


def write_arpa(model: NGramModel, out: TextIO) -> None:
    """Dump the model as ARPA text.

    Listed n-grams carry the interpolated probability; backoff weights are
    ``D*T(h)/A(h)`` for observed contexts. n-grams that only exist as
    contexts (e.g. ``<s> <s>``) are listed with probability -99.
    """
    tok = model.id_to_token
    n = model.order
    levels = model._levels
    sections: list[dict[tuple[int, ...], float]] = []
    for k in range(1, n + 1):
        probs: dict[tuple[int, ...], float] = {}
        if k == 1:
            for w in range(len(tok)):
                probs[(w,)] = -99.0 if w == BOS_ID else _log10(float(model._unigram[w]))
        else:
            for h, ctx in levels[k].items():
                for w in ctx.counts:
                    probs[h + (w,)] = _log10(model.prob_ids(w, h))
        sections.append(probs)
    for k in range(1, n):
        for h in levels[k + 1]:
            sections[k - 1].setdefault(h, -99.0)
    out.write("\\data\\\n")
    for k in range(1, n + 1):
        out.write(f"ngram {k}={len(sections[k - 1])}\n")
    for k in range(1, n + 1):
        out.write(f"\n\\{k}-grams:\n")
        for g in sorted(sections[k - 1], key=lambda g: [tok[i] for i in g]):
            line = f"{sections[k - 1][g]:.10f}\t{' '.join(tok[i] for i in g)}"
            if k < n:
                ctx = levels[k + 1].get(g)
                if ctx is not None:
                    d = model.discounts[k]
                    line += f"\t{math.log10(d * ctx.types / ctx.total):.10f}"
            out.write(line + "\n")
    out.write("\n\\end\\\n")

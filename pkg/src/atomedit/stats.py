"""Corpus statistics over mined insertions: POS distributions, rate ratios, lengths."""

from __future__ import annotations

import csv
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, TextIO

from .types import AtomicEdit, EditKind

DEFAULT_MIN_COUNT = 5


class UnknownTagError(ValueError):
    pass


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    pos: str


def _tagset_header(line: str) -> str | None:
    line = line.strip()
    if line.startswith("#") and "tagset" in line:
        return line.split(":", 1)[-1].split("=", 1)[-1].strip().lower() or None
    return None


def read_tag_sidecar(f: TextIO) -> tuple[str | None, dict[str, list[tuple[int, str, str]]]]:
    """Read ``record_id  token_index  surface  pos`` rows.

    ``token_index`` is the position inside the inserted phrase. A leading
    ``# tagset: <name>`` comment declares the tagset.
    """
    tagset = None
    tags: dict[str, list[tuple[int, str, str]]] = {}
    for lineno, line in enumerate(f, 1):
        if line.startswith("#"):
            tagset = tagset or _tagset_header(line)
            continue
        if not line.strip():
            continue
        cols = line.rstrip("\n").split("\t")
        if len(cols) != 4:
            raise ValueError(f"tag sidecar line {lineno}: expected 4 columns")
        rid, idx, surface, pos = cols
        if not pos:
            raise ValueError(f"tag sidecar line {lineno}: empty POS tag")
        tags.setdefault(rid, []).append((int(idx), surface, pos))
    for rows in tags.values():
        rows.sort()
    return tagset, tags


def read_background(f: TextIO, column: str = "upos") -> tuple[str | None, Iterator[TaggedToken]]:
    """Background tokens from CoNLL-U (``column`` upos/xpos) or ``surface  pos`` TSV."""
    lines = iter(f)
    first = next(lines, "")
    tagset = _tagset_header(first)

    def gen() -> Iterator[TaggedToken]:
        head = [] if tagset else [first]
        for line in itertools.chain(head, lines):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) == 10:
                if "-" in cols[0] or "." in cols[0]:
                    continue
                yield TaggedToken(cols[1], cols[3] if column == "upos" else cols[4])
            elif len(cols) == 2:
                yield TaggedToken(cols[0], cols[1])
            else:
                raise ValueError(f"unrecognised background line: {line!r}")

    return tagset, gen()


def inserted_tokens(
    edits: Iterable[AtomicEdit],
    tags: Mapping[str, list[tuple[int, str, str]]],
    single_word_only: bool = True,
    untagged: Counter | None = None,
) -> Iterator[TaggedToken]:
    """Tagged tokens of inserted phrases; edits missing from ``tags`` bump ``untagged['edits']``."""
    for e in edits:
        if e.kind is not EditKind.INSERTION:
            continue
        if single_word_only and len(e.phrase_tokens) != 1:
            continue
        rows = tags.get(e.record_id)
        if rows is None:
            if untagged is not None:
                untagged["edits"] += 1
            continue
        for _, surface, pos in rows:
            yield TaggedToken(surface, pos)


@dataclass
class PosDistribution:
    freqs: dict[str, float]
    tokens: int
    untagged: int = 0


def _normalise(counts: Counter) -> dict[str, float]:
    total = sum(counts.values())
    if not total:
        return {}
    return {pos: counts[pos] / total for pos in sorted(counts)}


def pos_distribution(
    edits: Iterable[AtomicEdit],
    tags: Mapping[str, list[tuple[int, str, str]]],
    single_word_only: bool = True,
) -> PosDistribution:
    """Relative POS frequencies among inserted phrases (single words by default)."""
    untagged: Counter = Counter()
    counts = Counter(t.pos for t in inserted_tokens(edits, tags, single_word_only, untagged))
    return PosDistribution(_normalise(counts), sum(counts.values()), untagged["edits"])


def background_distribution(tokens: Iterable[TaggedToken]) -> PosDistribution:
    counts = Counter(t.pos for t in tokens)
    return PosDistribution(_normalise(counts), sum(counts.values()))


@dataclass(frozen=True)
class RateRatio:
    word: str
    pos: str
    rate_insertion: float
    rate_general: float
    count_insertion: int
    count_general: int
    smoothed: bool = False

    @property
    def ratio(self) -> float:
        return self.rate_insertion / self.rate_general


def rate_ratios(
    inserted: Iterable[TaggedToken],
    background: Iterable[TaggedToken],
    pos: str,
    top_n: int | None = 10,
    min_count: int = DEFAULT_MIN_COUNT,
    under: bool = False,
) -> list[RateRatio]:
    """Words of one POS ranked by (rate as insertion) / (rate in general text).

    A rate is occurrences per thousand tokens of that POS. Words never seen
    in the background get ``count_general + 1`` in the rate and ``smoothed``
    set. ``under=True`` ranks the most under-inserted words first instead.
    """
    ins = Counter()
    ins_tags = set()
    for t in inserted:
        ins_tags.add(t.pos)
        if t.pos == pos:
            ins[t.surface] += 1
    gen = Counter()
    gen_tags = set()
    for t in background:
        gen_tags.add(t.pos)
        if t.pos == pos:
            gen[t.surface] += 1
    valid = ins_tags | gen_tags
    if pos not in valid:
        raise UnknownTagError(f"unknown POS tag {pos!r}; valid tags: {', '.join(sorted(valid))}")
    ins_total = sum(ins.values())
    gen_total = sum(gen.values())
    out = []
    for word, c_ins in ins.items():
        if c_ins < min_count:
            continue
        c_gen = gen.get(word, 0)
        smoothed = c_gen == 0
        rate_gen = 1000.0 * (c_gen + 1 if smoothed else c_gen) / max(gen_total, 1)
        out.append(RateRatio(word, pos, 1000.0 * c_ins / ins_total, rate_gen, c_ins, c_gen, smoothed))
    if under:
        out.sort(key=lambda r: (r.ratio, r.word))
    else:
        out.sort(key=lambda r: (-r.ratio, r.word))
    return out if top_n is None else out[:top_n]


@dataclass
class LengthHistogram:
    counts: dict[int, int]
    total: int
    cumulative: dict[int, float] = field(default_factory=dict)

    @property
    def single_word_fraction(self) -> float:
        return self.counts.get(1, 0) / self.total if self.total else 0.0

    @property
    def under_five_fraction(self) -> float:
        if not self.total:
            return 0.0
        return sum(c for n, c in self.counts.items() if n < 5) / self.total


def length_histogram(edits: Iterable[AtomicEdit]) -> LengthHistogram:
    """Phrase lengths in tokens, with cumulative fractions by length."""
    counts = Counter(len(e.phrase_tokens) for e in edits)
    total = sum(counts.values())
    cumulative = {}
    running = 0
    for n in sorted(counts):
        running += counts[n]
        cumulative[n] = running / total
    return LengthHistogram(dict(sorted(counts.items())), total, cumulative)


def write_rate_table(rows: Iterable[RateRatio], out: TextIO) -> None:
    w = csv.writer(out, delimiter="\t", lineterminator="\n")
    w.writerow(["word", "rate_ins", "rate_gen", "count_ins", "count_gen", "smoothed"])
    for r in rows:
        w.writerow(
            [r.word, f"{r.rate_insertion:.4f}", f"{r.rate_general:.4f}", r.count_insertion, r.count_general, int(r.smoothed)]
        )


def write_pos_table(inserted: PosDistribution, general: PosDistribution, out: TextIO) -> None:
    w = csv.writer(out, delimiter="\t", lineterminator="\n")
    w.writerow(["pos", "freq_ins", "freq_gen"])
    tags = sorted(set(inserted.freqs) | set(general.freqs), key=lambda p: (-inserted.freqs.get(p, 0.0), p))
    for p in tags:
        w.writerow([p, f"{inserted.freqs.get(p, 0.0):.6f}", f"{general.freqs.get(p, 0.0):.6f}"])


def distribution_sum(dist: Mapping[str, float]) -> float:
    return math.fsum(dist.values())

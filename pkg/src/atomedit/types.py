"""Core records shared by every stage of the pipeline."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any


class EditKind(str, enum.Enum):
    INSERTION = "insertion"
    DELETION = "deletion"


class Category(str, enum.Enum):
    """Manual edit-type labels. Assigned outside this package."""

    EXTEND = "extend"
    REFINE = "refine"
    REFERRING_EXPRESSION = "re"
    FLUENCY = "fluency"
    ERROR = "error"


@dataclass(frozen=True)
class Sentence:
    """A sentence plus its tokenization.

    ``byte_offsets`` index into the UTF-8 encoding of ``text``; every token is
    the exact byte slice it points at, so the text between consecutive spans
    is the original inter-token material.
    """

    text: str
    tokens: tuple[str, ...]
    byte_offsets: tuple[tuple[int, int], ...]

    @classmethod
    def from_tokens(cls, tokens: list[str] | tuple[str, ...]) -> Sentence:
        """Build a sentence whose text is ``tokens`` joined by single spaces."""
        offsets = []
        pos = 0
        for i, tok in enumerate(tokens):
            if i:
                pos += 1
            n = len(tok.encode("utf-8"))
            offsets.append((pos, pos + n))
            pos += n
        return cls(" ".join(tokens), tuple(tokens), tuple(offsets))

    @property
    def data(self) -> bytes:
        return self.text.encode("utf-8")

    def reconstruct(self) -> str:
        """Rebuild the text from tokens and the original gap bytes."""
        raw = self.data
        out = bytearray()
        prev = 0
        for tok, (start, end) in zip(self.tokens, self.byte_offsets):
            out += raw[prev:start]
            out += tok.encode("utf-8")
            prev = end
        out += raw[prev:]
        return out.decode("utf-8")

    def problems(self) -> list[str]:
        errs = []
        if len(self.tokens) != len(self.byte_offsets):
            errs.append("token/offset length mismatch")
            return errs
        raw = self.data
        prev_end = 0
        for tok, (start, end) in zip(self.tokens, self.byte_offsets):
            if not (prev_end <= start < end <= len(raw)):
                errs.append(f"bad offsets ({start}, {end})")
                break
            if raw[start:end] != tok.encode("utf-8"):
                errs.append(f"token {tok!r} does not match bytes at ({start}, {end})")
                break
            prev_end = end
        return errs

    def to_dict(self) -> dict[str, Any]:
        return {
            "text": self.text,
            "tokens": list(self.tokens),
            "byte_offsets": [list(span) for span in self.byte_offsets],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Sentence:
        return cls(
            d["text"],
            tuple(d["tokens"]),
            tuple((int(a), int(b)) for a, b in d["byte_offsets"]),
        )


@dataclass(frozen=True)
class DiffResult:
    """The atomic part of an edit, as found by :func:`atomedit.extract.atomic_diff`."""

    kind: EditKind
    phrase: str
    byte_span: tuple[int, int]
    token_index: int | None
    phrase_tokens: tuple[str, ...]

    @property
    def token_aligned(self) -> bool:
        return self.token_index is not None


@dataclass
class AtomicEdit:
    base_sentence: Sentence
    edited_sentence: Sentence
    phrase: str
    phrase_tokens: tuple[str, ...]
    kind: EditKind
    byte_span: tuple[int, int]
    token_index: int | None
    language: str
    article_id: str = ""
    base_revision_id: str = ""
    edited_revision_id: str = ""
    bleu: float | None = None
    provenance: str = "wiki"
    category: Category | None = None
    record_id: str = field(default="")

    def __post_init__(self) -> None:
        if not self.record_id:
            self.record_id = self.default_record_id()

    @property
    def token_aligned(self) -> bool:
        return self.token_index is not None

    @property
    def longer(self) -> Sentence:
        return self.edited_sentence if self.kind is EditKind.INSERTION else self.base_sentence

    @property
    def shorter(self) -> Sentence:
        return self.base_sentence if self.kind is EditKind.INSERTION else self.edited_sentence

    def default_record_id(self) -> str:
        key = "\x1f".join(
            [
                self.provenance,
                self.language,
                self.article_id,
                self.base_revision_id,
                self.edited_revision_id,
                self.kind.value,
                self.base_sentence.text,
                self.edited_sentence.text,
                f"{self.byte_span[0]}:{self.byte_span[1]}",
            ]
        )
        return hashlib.sha1(key.encode("utf-8")).hexdigest()[:16]

    def problems(self) -> list[str]:
        """Check the byte-exact reconstruction invariants; empty list means valid."""
        errs = []
        if not self.phrase:
            errs.append("empty phrase")
        for name, sent in (("base", self.base_sentence), ("edited", self.edited_sentence)):
            errs.extend(f"{name}: {e}" for e in sent.problems())
        longer = self.longer.data
        shorter = self.shorter.data
        p = self.phrase.encode("utf-8")
        start, end = self.byte_span
        if end - start != len(p) or longer[start:end] != p:
            errs.append("byte_span does not locate phrase in the longer sentence")
        if shorter[:start] + p + shorter[start:] != longer:
            errs.append("phrase insertion does not reproduce the longer sentence")
        if self.token_index is not None:
            short_toks = list(self.shorter.tokens)
            if not 0 <= self.token_index <= len(short_toks):
                errs.append("token_index out of range")
            else:
                rebuilt = (
                    short_toks[: self.token_index]
                    + list(self.phrase_tokens)
                    + short_toks[self.token_index :]
                )
                if rebuilt != list(self.longer.tokens):
                    errs.append("phrase_tokens at token_index do not rebuild the longer token list")
        return errs

    def to_dict(self) -> dict[str, Any]:
        # key order is part of the interchange format
        return {
            "record_id": self.record_id,
            "kind": self.kind.value,
            "language": self.language,
            "provenance": self.provenance,
            "article_id": self.article_id,
            "base_revision_id": self.base_revision_id,
            "edited_revision_id": self.edited_revision_id,
            "phrase": self.phrase,
            "phrase_tokens": list(self.phrase_tokens),
            "byte_span": list(self.byte_span),
            "token_index": self.token_index,
            "token_aligned": self.token_aligned,
            "bleu": None if self.bleu is None else round(self.bleu, 6),
            "category": None if self.category is None else self.category.value,
            "base_sentence": self.base_sentence.to_dict(),
            "edited_sentence": self.edited_sentence.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> AtomicEdit:
        cat = d.get("category")
        return cls(
            base_sentence=Sentence.from_dict(d["base_sentence"]),
            edited_sentence=Sentence.from_dict(d["edited_sentence"]),
            phrase=d["phrase"],
            phrase_tokens=tuple(d.get("phrase_tokens", ())),
            kind=EditKind(d["kind"]),
            byte_span=(int(d["byte_span"][0]), int(d["byte_span"][1])),
            token_index=d.get("token_index"),
            language=d.get("language", ""),
            article_id=d.get("article_id", ""),
            base_revision_id=d.get("base_revision_id", ""),
            edited_revision_id=d.get("edited_revision_id", ""),
            bleu=d.get("bleu"),
            provenance=d.get("provenance", "wiki"),
            category=Category(cat) if cat else None,
            record_id=d.get("record_id", ""),
        )

    @classmethod
    def from_json(cls, line: str) -> AtomicEdit:
        return cls.from_dict(json.loads(line))

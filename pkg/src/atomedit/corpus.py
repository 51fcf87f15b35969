"""AtomicEdit JSONL shards: reading, crash-safe writing and validation."""

from __future__ import annotations

import contextlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .types import AtomicEdit

SHARD_PATTERN = "shard_{:05d}.jsonl"


@contextlib.contextmanager
def atomic_open(path: str | os.PathLike[str]) -> Iterator[TextIO]:
    """Text file handle whose contents appear at ``path`` only on clean exit.

    Writes go to a hidden temp file in the same directory, which is renamed
    into place once flushed to disk.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            yield f
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str | os.PathLike[str], text: str) -> None:
    with atomic_open(path) as f:
        f.write(text)


class ShardWriter:
    """Single-writer JSONL shard sink.

    Each shard is buffered then published atomically, so a killed run never
    leaves a truncated file under a final ``shard_*.jsonl`` name.
    """

    def __init__(self, out_dir: str | os.PathLike[str], shard_size: int = 100_000):
        if shard_size < 1:
            raise ValueError("shard_size must be >= 1")
        self.out_dir = Path(out_dir)
        self.shard_size = shard_size
        self.paths: list[Path] = []
        self._lines: list[str] = []
        self.count = 0

    def write(self, edit: AtomicEdit) -> None:
        self._lines.append(edit.to_json() + "\n")
        self.count += 1
        if len(self._lines) >= self.shard_size:
            self._flush()

    def _flush(self) -> None:
        if not self._lines:
            return
        path = self.out_dir / SHARD_PATTERN.format(len(self.paths))
        atomic_write_text(path, "".join(self._lines))
        self.paths.append(path)
        self._lines = []

    def close(self) -> list[Path]:
        self._flush()
        return self.paths

    def __enter__(self) -> ShardWriter:
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is None:
            self.close()


def shard_paths(target: str | os.PathLike[str]) -> list[Path]:
    """A single JSONL file, or every ``*.jsonl`` in a directory (sorted)."""
    p = Path(target)
    if p.is_dir():
        return sorted(x for x in p.glob("*.jsonl") if not x.name.startswith("."))
    return [p]


def read_edits(paths: str | os.PathLike[str] | Iterable[str | os.PathLike[str]]) -> Iterator[AtomicEdit]:
    if isinstance(paths, (str, os.PathLike)):
        paths = shard_paths(paths)
    for path in paths:
        with open(path, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    yield AtomicEdit.from_json(line)


def write_jsonl(path: str | os.PathLike[str], rows: Iterable[dict]) -> int:
    n = 0
    with atomic_open(path) as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")
            n += 1
    return n


def read_jsonl(path: str | os.PathLike[str]) -> Iterator[dict]:
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                yield json.loads(line)


@dataclass
class ValidationReport:
    records: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"records": self.records, "violations": self.violations, "ok": self.ok}


def validate_corpus(paths: Iterable[str | os.PathLike[str]]) -> ValidationReport:
    """Re-check every record's reconstruction invariants byte-exactly."""
    report = ValidationReport()
    for path in paths:
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                report.records += 1
                try:
                    edit = AtomicEdit.from_json(line)
                except (ValueError, KeyError, TypeError) as exc:
                    report.violations.append(
                        {"file": str(path), "line": lineno, "record_id": None, "problems": [f"unparseable: {exc}"]}
                    )
                    continue
                problems = edit.problems()
                if problems:
                    report.violations.append(
                        {"file": str(path), "line": lineno, "record_id": edit.record_id, "problems": problems}
                    )
    return report

"""Revision snapshot sources: MediaWiki XML exports and snapshot directories."""

from __future__ import annotations

import bz2
import codecs
import gzip
import heapq
import logging
import lzma
import os
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

from ..types import Sentence
from .markup import strip_markup
from .segment import load_abbreviations, segment_document, tokenize

log = logging.getLogger(__name__)

DEFAULT_MAX_SNAPSHOTS = 100_000
_READ_SIZE = 1 << 16
_PAGE_OPEN = re.compile(r"<page[\s>]")
_PAGE_CLOSE = "</page>"


@dataclass(frozen=True)
class IngestConfig:
    max_snapshots: int = DEFAULT_MAX_SNAPSHOTS
    language: str = "en"
    abbrev_list_path: str | None = None
    source_format: str = "auto"  # "xml", "dir" or "auto"
    skip_unchanged: bool = True

    def __post_init__(self) -> None:
        if self.max_snapshots < 1:
            raise ValueError("max_snapshots must be >= 1")
        if self.source_format not in ("auto", "xml", "dir"):
            raise ValueError(f"unknown source_format {self.source_format!r}")


@dataclass(frozen=True)
class RawSnapshot:
    article_id: str
    revision_id: str
    timestamp: str
    body: str


@dataclass(frozen=True)
class IngestError:
    """A per-article failure; the stream carries on after it."""

    article_id: str
    message: str


@dataclass(frozen=True)
class Snapshot:
    article_id: str
    revision_id: str
    sentences: tuple[Sentence, ...]
    timestamp: str = ""


def open_maybe_compressed(path: str | os.PathLike[str]) -> BinaryIO:
    """Open a file, transparently decompressing bz2/gzip/xz by magic bytes."""
    f = open(path, "rb")
    head = f.read(6)
    f.seek(0)
    if head.startswith(b"BZh"):
        return bz2.BZ2File(f)
    if head.startswith(b"\x1f\x8b"):
        return gzip.GzipFile(fileobj=f)
    if head.startswith(b"\xfd7zXZ\x00"):
        return lzma.LZMAFile(f)
    return f


def _parse_timestamp(ts: str) -> datetime:
    try:
        dt = datetime.fromisoformat(ts.strip().replace("Z", "+00:00"))
    except ValueError:
        return datetime.min.replace(tzinfo=timezone.utc)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _child_text(elem: ET.Element, name: str) -> str | None:
    for child in elem:
        if _local(child.tag) == name:
            return child.text or ""
    return None


class _PageCollector:
    """Incrementally parses one ``<page>`` element, keeping the newest revisions."""

    def __init__(self, max_snapshots: int):
        self.parser = ET.XMLPullParser(events=("start", "end"))
        self.max_snapshots = max_snapshots
        self.heap: list[tuple[datetime, int, RawSnapshot]] = []
        self.page: ET.Element | None = None
        self.article_id: str | None = None
        self.title: str | None = None
        self.seen_revisions: set[str] = set()
        self.seq = 0

    def feed(self, data: str) -> None:
        self.parser.feed(data)
        for event, elem in self.parser.read_events():
            name = _local(elem.tag)
            if event == "start":
                if name == "page" and self.page is None:
                    self.page = elem
                continue
            if self.page is None:
                continue
            if name == "title" and self.title is None and elem in self.page:
                self.title = elem.text or ""
            elif name == "id" and self.article_id is None and elem in self.page:
                self.article_id = (elem.text or "").strip()
            elif name == "revision":
                self._add_revision(elem)
                self.page.remove(elem)

    def _add_revision(self, rev: ET.Element) -> None:
        rev_id = (_child_text(rev, "id") or "").strip()
        ts = (_child_text(rev, "timestamp") or "").strip()
        body = _child_text(rev, "text") or ""
        if rev_id in self.seen_revisions:
            log.warning("duplicate revision id %s in article %s", rev_id, self.key)
            return
        self.seen_revisions.add(rev_id)
        snap = RawSnapshot(self.key, rev_id, ts, body)
        item = (_parse_timestamp(ts), self.seq, snap)
        self.seq += 1
        if len(self.heap) < self.max_snapshots:
            heapq.heappush(self.heap, item)
        else:
            heapq.heappushpop(self.heap, item)

    @property
    def key(self) -> str:
        return self.article_id or self.title or "?"

    def finish(self) -> list[RawSnapshot]:
        self.parser.close()
        return [snap for _, _, snap in sorted(self.heap)]


def _drop_unchanged(snaps: list[RawSnapshot]) -> list[RawSnapshot]:
    out: list[RawSnapshot] = []
    for snap in snaps:
        if out and out[-1].body == snap.body:
            continue
        out.append(snap)
    return out


def _iter_text(source: BinaryIO) -> Iterator[str]:
    decoder = codecs.getincrementaldecoder("utf-8")(errors="replace")
    while True:
        block = source.read(_READ_SIZE)
        if not block:
            tail = decoder.decode(b"", final=True)
            if tail:
                yield tail
            return
        yield decoder.decode(block)


def read_xml_dump(
    source: BinaryIO, config: IngestConfig = IngestConfig()
) -> Iterator[RawSnapshot | IngestError]:
    """Stream revisions out of a MediaWiki XML export.

    Pages are cut out of the byte stream and parsed one at a time, so a
    malformed page only costs that article: it yields an :class:`IngestError`
    and scanning resumes at the next ``<page>``. Memory per article is bounded
    by ``config.max_snapshots`` revisions.
    """
    buf = ""
    collector: _PageCollector | None = None
    failed = False
    at_page_start = False
    keep = len(_PAGE_CLOSE) - 1

    def close_page() -> Iterator[RawSnapshot | IngestError]:
        nonlocal collector, failed
        assert collector is not None
        if not failed:
            try:
                snaps = collector.finish()
            except ET.ParseError as exc:
                yield IngestError(collector.key, f"malformed XML: {exc}")
            else:
                if config.skip_unchanged:
                    snaps = _drop_unchanged(snaps)
                yield from snaps
        collector = None
        failed = False

    def feed(data: str) -> Iterator[IngestError]:
        nonlocal failed
        assert collector is not None
        if failed or not data:
            return
        try:
            collector.feed(data)
        except ET.ParseError as exc:
            failed = True
            yield IngestError(collector.key, f"malformed XML: {exc}")

    for chunk in _iter_text(source):
        buf += chunk
        while True:
            if collector is None:
                m = _PAGE_OPEN.search(buf)
                if m is None:
                    buf = buf[-keep:] if len(buf) > keep else buf
                    break
                buf = buf[m.start() :]
                collector = _PageCollector(config.max_snapshots)
                at_page_start = True
            # a nested <page> before </page> means the previous one never closed
            end = buf.find(_PAGE_CLOSE)
            nxt = _PAGE_OPEN.search(buf, 1 if at_page_start else 0)
            if nxt is not None and (end < 0 or nxt.start() < end):
                yield from feed(buf[: nxt.start()])
                if not failed:
                    failed = True
                    yield IngestError(collector.key, "malformed XML: unterminated <page>")
                yield from close_page()
                buf = buf[nxt.start() :]
                continue
            if end < 0:
                cut = max(len(buf) - keep, 0)
                if cut:
                    yield from feed(buf[:cut])
                    buf = buf[cut:]
                    at_page_start = False
                break
            stop = end + len(_PAGE_CLOSE)
            yield from feed(buf[:stop])
            buf = buf[stop:]
            yield from close_page()
    if collector is not None:
        yield from feed(buf)
        if not failed:
            failed = True
            yield IngestError(collector.key, "malformed XML: truncated <page>")
        yield from close_page()


def _natural_key(name: str) -> tuple[int, int | str]:
    return (0, int(name)) if name.isdigit() else (1, name)


def read_snapshot_dir(
    root: str | os.PathLike[str], config: IngestConfig = IngestConfig()
) -> Iterator[RawSnapshot | IngestError]:
    """Read ``root/<article_id>/<revision_id>.txt`` trees.

    Revisions are ordered by revision id (numerically when all digits);
    the timestamp field carries the file modification time.
    """
    root = Path(root)
    for article in sorted((p for p in root.iterdir() if p.is_dir()), key=lambda p: p.name):
        try:
            files = sorted(article.glob("*.txt"), key=lambda p: _natural_key(p.stem))
            files = files[-config.max_snapshots :]
            snaps = []
            for f in files:
                mtime = datetime.fromtimestamp(f.stat().st_mtime, tz=timezone.utc)
                body = f.read_bytes().decode("utf-8", errors="replace")
                snaps.append(
                    RawSnapshot(article.name, f.stem, mtime.isoformat().replace("+00:00", "Z"), body)
                )
        except OSError as exc:
            yield IngestError(article.name, str(exc))
            continue
        if config.skip_unchanged:
            snaps = _drop_unchanged(snaps)
        yield from snaps


def read_dump(
    source: BinaryIO | str | os.PathLike[str], config: IngestConfig = IngestConfig()
) -> Iterator[RawSnapshot | IngestError]:
    """Read snapshots from a byte stream, an XML file path or a snapshot directory.

    Output is grouped by article with revisions in ascending time order.
    """
    if isinstance(source, (str, os.PathLike)):
        path = Path(source)
        fmt = config.source_format
        if fmt == "dir" or (fmt == "auto" and path.is_dir()):
            yield from read_snapshot_dir(path, config)
            return
        with open_maybe_compressed(path) as f:
            yield from read_xml_dump(f, config)
        return
    yield from read_xml_dump(source, config)


def group_by_article(
    items: Iterable[RawSnapshot | IngestError],
) -> Iterator[tuple[str, list[RawSnapshot], list[IngestError]]]:
    """Collapse a snapshot stream into per-article lists."""
    current: str | None = None
    snaps: list[RawSnapshot] = []
    errors: list[IngestError] = []
    for item in items:
        if item.article_id != current:
            if current is not None:
                yield current, snaps, errors
            current, snaps, errors = item.article_id, [], []
        if isinstance(item, IngestError):
            errors.append(item)
        else:
            snaps.append(item)
    if current is not None:
        yield current, snaps, errors


def build_snapshot(raw: RawSnapshot, language: str = "en", abbrev_list_path: str | None = None) -> Snapshot:
    """Strip, split and tokenize one raw revision."""
    abbrevs = load_abbreviations(language, abbrev_list_path)
    text = strip_markup(raw.body)
    sentences = tuple(tokenize(s, language) for s in segment_document(text, language, abbrevs))
    return Snapshot(raw.article_id, raw.revision_id, sentences, raw.timestamp)


def pair_snapshots(snapshots: list[Snapshot]) -> list[tuple[Snapshot, Snapshot]]:
    return list(zip(snapshots, snapshots[1:]))


def sentence_lines(snapshots: Iterable[Snapshot]) -> Iterator[str]:
    """One sentence per line, a blank line after each snapshot."""
    for snap in snapshots:
        for sent in snap.sentences:
            yield sent.text + "\n"
        yield "\n"

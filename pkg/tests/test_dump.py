from __future__ import annotations

import bz2
import gzip
import io
import lzma
import os
import time

import pytest

from atomedit.ingest import (
    IngestConfig,
    IngestError,
    RawSnapshot,
    build_snapshot,
    group_by_article,
    pair_snapshots,
    read_dump,
    sentence_lines,
)


def _page(title, pid, revs):
    out = [f"<page><title>{title}</title><ns>0</ns><id>{pid}</id>"]
    for rid, ts, text in revs:
        out.append(
            f"<revision><id>{rid}</id><timestamp>{ts}</timestamp>"
            f'<text xml:space="preserve">{text}</text></revision>'
        )
    out.append("</page>")
    return "".join(out)


def _dump(*pages):
    return ('<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.10/">' + "".join(pages) + "</mediawiki>").encode()


def _snaps(items):
    return [x for x in items if isinstance(x, RawSnapshot)]


def test_two_revisions_in_timestamp_order():
    # deliberately listed newest first
    xml = _dump(_page("A", 1, [(2, "2020-01-02T00:00:00Z", "New."), (1, "2020-01-01T00:00:00Z", "Old.")]))
    snaps = _snaps(read_dump(io.BytesIO(xml)))
    assert [s.revision_id for s in snaps] == ["1", "2"]
    assert [s.body for s in snaps] == ["Old.", "New."]
    assert all(s.article_id == "1" for s in snaps)


def test_max_snapshots_drops_oldest():
    n = 100_001
    revs = "".join(
        "<revision><id>{0}</id><timestamp>{1}</timestamp><text>r{0}</text></revision>".format(
            i, time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(1_000_000_000 + i))
        )
        for i in range(n)
    )
    xml = _dump(f"<page><title>Big</title><id>9</id>{revs}</page>")
    snaps = _snaps(read_dump(io.BytesIO(xml), IngestConfig(max_snapshots=100_000)))
    assert len(snaps) == 100_000
    assert snaps[0].revision_id == "1"
    assert snaps[-1].revision_id == str(n - 1)


def test_snapshot_directory(tmp_path):
    art = tmp_path / "A"
    art.mkdir()
    (art / "2.txt").write_text("Second.", encoding="utf-8")
    (art / "1.txt").write_text("First.", encoding="utf-8")
    (art / "10.txt").write_text("Tenth.", encoding="utf-8")
    snaps = _snaps(read_dump(tmp_path))
    assert [(s.article_id, s.revision_id) for s in snaps] == [("A", "1"), ("A", "2"), ("A", "10")]


def test_malformed_page_reported_and_stream_continues():
    bad = "<page><title>Bad</title><id>2</id><revision><id>5</id><text>oops</revison></page>"
    xml = _dump(_page("A", 1, [(1, "2020-01-01T00:00:00Z", "One.")]), bad, _page("C", 3, [(7, "2020-01-01T00:00:00Z", "Three.")]))
    items = list(read_dump(io.BytesIO(xml)))
    errors = [x for x in items if isinstance(x, IngestError)]
    assert len(errors) == 1
    assert [s.article_id for s in _snaps(items)] == ["1", "3"]


def test_invalid_utf8_replaced():
    raw = _dump(_page("A", 1, [(1, "2020-01-01T00:00:00Z", "cafX")])).replace(b"cafX", b"caf\xff")
    snaps = _snaps(read_dump(io.BytesIO(raw)))
    assert snaps[0].body == "caf�"


def test_unchanged_revisions_skipped():
    xml = _dump(
        _page(
            "A",
            1,
            [(1, "2020-01-01T00:00:00Z", "Same."), (2, "2020-01-02T00:00:00Z", "Same."), (3, "2020-01-03T00:00:00Z", "Diff.")],
        )
    )
    assert [s.revision_id for s in _snaps(read_dump(io.BytesIO(xml)))] == ["1", "3"]
    cfg = IngestConfig(skip_unchanged=False)
    assert len(_snaps(read_dump(io.BytesIO(xml), cfg))) == 3


@pytest.mark.parametrize("compress,suffix", [(bz2.compress, ".bz2"), (gzip.compress, ".gz"), (lzma.compress, ".xz")])
def test_compressed_inputs(tmp_path, mini_dump, compress, suffix):
    path = tmp_path / ("dump.xml" + suffix)
    path.write_bytes(compress(mini_dump.read_bytes()))
    plain = [s.revision_id for s in _snaps(read_dump(mini_dump))]
    assert [s.revision_id for s in _snaps(read_dump(path))] == plain


def test_group_build_and_pair(mini_dump):
    groups = list(group_by_article(read_dump(mini_dump)))
    assert [g[0] for g in groups] == ["101", "102", "103"]
    snaps = [build_snapshot(r) for r in groups[2][1]]
    assert snaps[0].sentences[0].text == "Marie Curie was a physicist and chemist."
    assert len(pair_snapshots(snaps)) == 1
    lines = list(sentence_lines(snaps))
    assert lines[-1] == "\n" and lines[0].endswith("chemist.\n")


def test_pair_snapshots_shapes():
    assert pair_snapshots(["A", "B", "C"]) == [("A", "B"), ("B", "C")]
    assert pair_snapshots(["A"]) == []
    assert pair_snapshots([]) == []


def test_missing_file_raises(tmp_path):
    with pytest.raises(OSError):
        list(read_dump(tmp_path / "nope.xml"))


def test_directory_timestamps_from_mtime(tmp_path):
    art = tmp_path / "B"
    art.mkdir()
    f = art / "1.txt"
    f.write_text("x.", encoding="utf-8")
    os.utime(f, (1_500_000_000, 1_500_000_000))
    (snap,) = _snaps(read_dump(tmp_path))
    assert snap.timestamp.startswith("2017-07-14")

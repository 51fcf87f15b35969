"""``atomedit`` command-line entry point.

Exit codes: 0 success, 1 fatal error, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import sys
from collections import Counter, deque
from concurrent.futures import Future, ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, TypeVar

from .config import ConfigError, PipelineConfig, load_config
from .corpus import (
    ShardWriter,
    atomic_open,
    atomic_write_text,
    read_edits,
    read_jsonl,
    shard_paths,
    validate_corpus,
    write_jsonl,
)
from .extract.align import AlignConfig
from .extract.pipeline import extract_edits
from .ingest.dump import RawSnapshot, build_snapshot, group_by_article, pair_snapshots, read_dump
from .ingest.segment import tokenize
from .types import AtomicEdit, EditKind

log = logging.getLogger("atomedit")

T = TypeVar("T")
R = TypeVar("R")


class FatalError(Exception):
    pass


class UsageError(Exception):
    pass


def _dump(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=False)


def _emit(obj: Any, out: str | None = None) -> None:
    text = _dump(obj) + "\n"
    if out:
        atomic_write_text(out, text)
    sys.stdout.write(text)


# extract -------------------------------------------------------------------


def _process_article(
    task: tuple[str, list[RawSnapshot], str, str | None, AlignConfig],
) -> tuple[str, list[AtomicEdit], int, int, str | None]:
    article_id, raws, language, abbrev_path, align = task
    try:
        snaps = [build_snapshot(r, language, abbrev_path) for r in raws]
        edits: list[AtomicEdit] = []
        pairs = pair_snapshots(snaps)
        for pair in pairs:
            edits.extend(extract_edits(pair, align, language))
        return article_id, edits, len(snaps), len(pairs), None
    except Exception as exc:  # per-article failures must not stop the run
        return article_id, [], 0, 0, f"{type(exc).__name__}: {exc}"


def ordered_map(fn: Callable[[T], R], items: Iterable[T], jobs: int) -> Iterator[R]:
    """Like ``map`` but fanned out over ``jobs`` processes, preserving input order.

    At most ``4 * jobs`` tasks are in flight, so the input is consumed lazily.
    """
    if jobs <= 1:
        yield from map(fn, items)
        return
    pending: deque[Future] = deque()
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= 4 * jobs:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def run_extract(config: PipelineConfig, dump_sentences: str | None = None) -> dict[str, Any]:
    """Mine atomic edits from ``config.input`` into JSONL shards under ``config.out``.

    Returns the summary, which is also written to ``summary.json``.
    """
    if not config.input:
        raise UsageError("extract needs --input (or ATOMEDIT_INPUT)")
    if not config.out:
        raise UsageError("extract needs --out (or ATOMEDIT_OUT)")
    src = Path(config.input)
    if not src.exists():
        raise FatalError(f"input not found: {src}")
    if not (src.is_dir() or os.access(src, os.R_OK)):
        raise FatalError(f"input not readable: {src}")
    out_dir = Path(config.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise FatalError(f"cannot create output directory {out_dir}: {exc}") from exc
    if not os.access(out_dir, os.W_OK):
        raise FatalError(f"output directory not writable: {out_dir}")

    errors: list[dict[str, str]] = []
    counts = Counter()
    articles = 0

    def tasks() -> Iterator[tuple[str, list[RawSnapshot], str, str | None, AlignConfig]]:
        for article_id, raws, errs in group_by_article(read_dump(src, config.ingest)):
            for e in errs:
                log.warning("article %s: %s", e.article_id, e.message)
                errors.append({"article_id": e.article_id, "message": e.message})
            if raws:
                yield article_id, raws, config.language, config.abbrev_list_path, config.align

    snapshots = pairs = 0
    try:
        with contextlib.ExitStack() as stack:
            sentence_out = stack.enter_context(atomic_open(dump_sentences)) if dump_sentences else None
            writer = stack.enter_context(ShardWriter(out_dir, config.shard_size))
            for article_id, edits, n_snaps, n_pairs, err in ordered_map(
                _process_article, tasks(), config.effective_jobs
            ):
                articles += 1
                if err is not None:
                    log.warning("article %s: %s", article_id, err)
                    errors.append({"article_id": article_id, "message": err})
                    continue
                snapshots += n_snaps
                pairs += n_pairs
                for e in edits:
                    writer.write(e)
                    counts[e.kind.value] += 1
                    if sentence_out is not None:
                        sentence_out.write(e.longer.text + "\n")
                log.info("article %s: %d edits", article_id, len(edits))
            shards = writer.close()
    except OSError as exc:
        raise FatalError(f"I/O error: {exc}") from exc

    ins = counts[EditKind.INSERTION.value]
    dels = counts[EditKind.DELETION.value]
    summary = {
        "language": config.language,
        "insertions": ins,
        "deletions": dels,
        "total": ins + dels,
        "articles": articles,
        "snapshots": snapshots,
        "snapshot_pairs": pairs,
        "shards": [p.name for p in shards],
        "errors": len(errors),
        "error_details": errors,
        "config": config.to_dict(),
    }
    atomic_write_text(out_dir / "summary.json", _dump(summary) + "\n")
    return summary


def cmd_extract(args: argparse.Namespace) -> int:
    overrides = {
        "input": args.input,
        "out": args.out,
        "language": args.lang,
        "input_format": args.format,
        "window_k": args.k,
        "min_bleu": args.min_bleu,
        "bleu_max_order": args.bleu_max_order,
        "shard_size": args.shard_size,
        "max_snapshots": args.max_snapshots,
        "abbrev_list_path": args.abbrev_list,
        "jobs": args.jobs,
    }
    try:
        cfg = load_config(args.config, overrides)
    except (ConfigError, OSError) as exc:
        raise UsageError(str(exc)) from exc
    summary = run_extract(cfg, args.dump_sentences)
    sys.stdout.write(_dump({k: v for k, v in summary.items() if k != "config"}) + "\n")
    return 0


# validate / stats ----------------------------------------------------------


def _expand(targets: Iterable[str]) -> list[Path]:
    out: list[Path] = []
    for t in targets:
        p = Path(t)
        if not p.exists():
            raise FatalError(f"not found: {p}")
        out.extend(shard_paths(p))
    return out


def cmd_validate(args: argparse.Namespace) -> int:
    report = validate_corpus(_expand(args.shards))
    _emit(report.to_dict(), args.out)
    for v in report.violations:
        log.error("%s:%s record %s: %s", v["file"], v["line"], v["record_id"], "; ".join(v["problems"]))
    return 0 if report.ok else 1


def _load_tags(path: str | None) -> tuple[str | None, dict]:
    from .stats import read_tag_sidecar

    if not path:
        return None, {}
    with open(path, encoding="utf-8") as f:
        return read_tag_sidecar(f)


def cmd_stats(args: argparse.Namespace) -> int:
    from .stats import background_distribution, length_histogram, pos_distribution, read_background, write_pos_table

    edits = list(read_edits(_expand(args.edits)))
    kinds = Counter(e.kind.value for e in edits)
    inserted = [e for e in edits if e.kind is EditKind.INSERTION]
    hist = length_histogram(inserted)
    result: dict[str, Any] = {
        "insertions": kinds[EditKind.INSERTION.value],
        "deletions": kinds[EditKind.DELETION.value],
        "total": len(edits),
        "insertion_lengths": {
            "counts": hist.counts,
            "cumulative": hist.cumulative,
            "single_word_fraction": hist.single_word_fraction,
            "under_five_fraction": hist.under_five_fraction,
        },
    }
    if args.tags:
        tagset, tags = _load_tags(args.tags)
        dist = pos_distribution(edits, tags, single_word_only=not args.all_lengths)
        result["pos_insertions"] = {"tagset": tagset, "freqs": dist.freqs, "tokens": dist.tokens, "untagged": dist.untagged}
        if args.background:
            with open(args.background, encoding="utf-8") as f:
                bg_tagset, tokens = read_background(f, args.column)
                general = background_distribution(tokens)
            if tagset and bg_tagset and tagset != bg_tagset:
                raise FatalError(f"tagset mismatch: sidecar {tagset}, background {bg_tagset}")
            result["pos_general"] = {"freqs": general.freqs, "tokens": general.tokens}
            if args.pos_table:
                with atomic_open(args.pos_table) as f:
                    write_pos_table(dist, general, f)
    _emit(result, args.out)
    return 0


def cmd_pos_rates(args: argparse.Namespace) -> int:
    from .stats import UnknownTagError, inserted_tokens, rate_ratios, read_background, write_rate_table

    _, tags = _load_tags(args.tags)
    edits = read_edits(_expand(args.edits))
    with open(args.background, encoding="utf-8") as f:
        _, background = read_background(f, args.column)
        try:
            rows = rate_ratios(
                inserted_tokens(edits, tags, single_word_only=not args.all_lengths),
                background,
                args.pos,
                top_n=args.top_n,
                min_count=args.min_count,
                under=args.under,
            )
        except UnknownTagError as exc:
            raise UsageError(str(exc)) from exc
    if args.out:
        with atomic_open(args.out) as f:
            write_rate_table(rows, f)
    write_rate_table(rows, sys.stdout)
    return 0


# language model ------------------------------------------------------------


def cmd_train_lm(args: argparse.Namespace) -> int:
    from .lm import EmptyCorpusError, save_model, train, write_arpa

    def sentences() -> Iterator[tuple[str, ...]]:
        with open(args.input, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    yield tokenize(line.strip(), args.lang).tokens

    try:
        model = train(sentences(), order=args.order, discount=args.discount, unk_threshold=args.unk_threshold)
    except EmptyCorpusError as exc:
        raise FatalError(str(exc)) from exc
    save_model(model, args.out)
    if args.arpa:
        with atomic_open(args.arpa) as f:
            write_arpa(model, f)
    info = {"order": model.order, "vocab_size": model.vocab_size, "out": args.out}
    sys.stdout.write(_dump(info) + "\n")
    return 0


def cmd_locate(args: argparse.Namespace) -> int:
    from .lm import load_model, locate

    model = load_model(args.model)
    skipped = Counter()

    def predictions() -> Iterator[dict]:
        for e in read_edits(_expand(args.edits)):
            if e.kind is not EditKind.INSERTION:
                skipped["not_insertion"] += 1
                continue
            if e.token_index is None:
                skipped["not_token_aligned"] += 1
                continue
            if not e.base_sentence.tokens:
                skipped["empty_base"] += 1
                continue
            cat = e.category.value if e.category is not None else None
            yield locate(model, e.base_sentence.tokens, e.phrase_tokens, e.token_index, e.record_id, cat).to_dict()

    n = write_jsonl(args.out, predictions())
    sys.stdout.write(_dump({"predictions": n, "skipped": dict(skipped)}) + "\n")
    return 0


def cmd_eval_locate(args: argparse.Namespace) -> int:
    from .lm import LocatePrediction, eval_accuracy

    try:
        report = eval_accuracy(LocatePrediction.from_dict(d) for d in read_jsonl(args.preds))
    except ValueError as exc:
        raise FatalError(str(exc)) from exc
    _emit(report.to_dict(), args.out)
    return 0


# pseudo-edits --------------------------------------------------------------


def cmd_pseudo(args: argparse.Namespace) -> int:
    from .pseudo import ConlluError, ParsedSentence, emit_marked, generate_pseudo_edits, read_conllu

    parses: list[ParsedSentence] = []
    bad = 0
    with open(args.input, encoding="utf-8") as f:
        for item in read_conllu(f):
            if isinstance(item, ConlluError):
                bad += 1
                log.warning("sentence %s (line %d): %s", item.sent_id or "?", item.line, item.message)
            else:
                parses.append(item)
    edits = generate_pseudo_edits(parses, args.n, args.seed, args.lang)
    n = 0
    with contextlib.ExitStack() as stack:
        marked = stack.enter_context(atomic_open(args.marked)) if args.marked else None
        out = stack.enter_context(atomic_open(args.out))
        for e in edits:
            out.write(e.to_json() + "\n")
            if marked is not None:
                marked.write(f"{e.record_id}\t{emit_marked(e)}\t{' '.join(e.phrase_tokens)}\n")
            n += 1
    if n < args.n:
        log.warning("generated %d of %d requested pseudo-edits", n, args.n)
    sys.stdout.write(_dump({"generated": n, "requested": args.n, "sentences": len(parses), "bad_sentences": bad}) + "\n")
    return 0


# evaluation ----------------------------------------------------------------


def cmd_eval_annotations(args: argparse.Namespace) -> int:
    from .evaluation import MissingRecordsError, annotator_agreement, error_rate_summary, read_annotations

    with open(args.annotations, encoding="utf-8") as f:
        anns = list(read_annotations(f))
    result: dict[str, Any] = {}
    if args.edits:
        gold = {e.record_id: e.token_index for e in read_edits(_expand(args.edits))}
        result["error_summary"] = error_rate_summary(anns, gold).to_dict()
        try:
            result["agreement"] = annotator_agreement(anns, gold).to_dict()
        except MissingRecordsError as exc:
            raise FatalError(str(exc)) from exc
    else:
        result["error_summary"] = error_rate_summary(anns).to_dict()
    _emit(result, args.out)
    return 0


def cmd_eval_phrases(args: argparse.Namespace) -> int:
    from .evaluation import EmbeddingTable, MissingRecordsError, exact_match_at_k, read_proposals, similarity_at_1

    with open(args.proposals, encoding="utf-8") as f:
        proposals = read_proposals(f)
    gold = {e.record_id: e.phrase for e in read_edits(_expand(args.gold))}
    try:
        result: dict[str, Any] = {"records": len(proposals), "k": args.k, "exact_match": exact_match_at_k(proposals, gold, args.k)}
        if args.embeddings:
            result["similarity_at_1"] = similarity_at_1(proposals, gold, EmbeddingTable.load(args.embeddings))
    except MissingRecordsError as exc:
        raise FatalError(str(exc)) from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(result, args.out)
    return 0


# parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="atomedit", description="Mine and analyse atomic Wikipedia edits.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    p.add_argument("-q", "--quiet", action="store_true", help="only log errors")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    x = sub.add_parser("extract", help="mine atomic edits from a revision dump")
    x.add_argument("--config", help="TOML config file; flags override it")
    x.add_argument("--input", help="XML dump (optionally compressed) or snapshot directory")
    x.add_argument("--format", choices=["auto", "xml", "dir"], default=None)
    x.add_argument("--lang", default=None)
    x.add_argument("--k", type=int, default=None, help="alignment window (default 5)")
    x.add_argument("--min-bleu", type=float, default=None)
    x.add_argument("--bleu-max-order", type=int, default=None)
    x.add_argument("--out", help="output shard directory")
    x.add_argument("--shard-size", type=int, default=None)
    x.add_argument("--max-snapshots", type=int, default=None)
    x.add_argument("--abbrev-list", default=None)
    x.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    x.add_argument("--dump-sentences", help="also write the longer sentence of every edit, one per line")
    x.set_defaults(func=cmd_extract)

    v = sub.add_parser("validate", help="re-check reconstruction invariants of edit shards")
    v.add_argument("shards", nargs="*", help="JSONL files or directories")
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("stats", help="kind counts, phrase lengths and POS distributions")
    s.add_argument("--edits", nargs="+", required=True)
    s.add_argument("--tags", help="TSV sidecar: record_id, token_index, surface, pos")
    s.add_argument("--background", help="CoNLL-U or surface/pos TSV of general text")
    s.add_argument("--column", choices=["upos", "xpos"], default="upos")
    s.add_argument("--all-lengths", action="store_true", help="include multi-word insertions")
    s.add_argument("--pos-table", help="write pos/freq_ins/freq_gen TSV here")
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)

    r = sub.add_parser("pos-rates", help="per-thousand insertion vs general rate ratios for one POS")
    r.add_argument("--edits", nargs="+", required=True)
    r.add_argument("--tags", required=True)
    r.add_argument("--background", required=True)
    r.add_argument("--pos", required=True)
    r.add_argument("--column", choices=["upos", "xpos"], default="upos")
    r.add_argument("--top-n", type=int, default=10)
    r.add_argument("--min-count", type=int, default=5)
    r.add_argument("--under", action="store_true", help="rank least over-inserted first")
    r.add_argument("--all-lengths", action="store_true")
    r.add_argument("--out")
    r.set_defaults(func=cmd_pos_rates)

    t = sub.add_parser("train-lm", help="train a Kneser-Ney n-gram model")
    t.add_argument("--in", dest="input", required=True, help="one sentence per line")
    t.add_argument("--out", required=True)
    t.add_argument("--order", type=int, default=3)
    t.add_argument("--discount", type=float, default=0.75)
    t.add_argument("--unk-threshold", type=int, default=2)
    t.add_argument("--lang", default="en")
    t.add_argument("--arpa", help="also export ARPA text")
    t.set_defaults(func=cmd_train_lm)

    lo = sub.add_parser("locate", help="predict insertion indices by minimum perplexity")
    lo.add_argument("--model", required=True)
    lo.add_argument("--edits", nargs="+", required=True)
    lo.add_argument("--out", required=True)
    lo.set_defaults(func=cmd_locate)

    el = sub.add_parser("eval-locate", help="accuracy of locate predictions")
    el.add_argument("--preds", required=True)
    el.add_argument("--out")
    el.set_defaults(func=cmd_eval_locate)

    ps = sub.add_parser("pseudo", help="simulate insertions by deleting dependency subtrees")
    ps.add_argument("--in", dest="input", required=True, help="CoNLL-U corpus")
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--lang", default="en")
    ps.add_argument("--out", required=True)
    ps.add_argument("--marked", help="also write record_id, marked base sentence, phrase TSV")
    ps.set_defaults(func=cmd_pseudo)

    ea = sub.add_parser("eval-annotations", help="error-rate summary and annotator agreement")
    ea.add_argument("--annotations", required=True, help="TSV record_id, annotator_id, judgment")
    ea.add_argument("--edits", nargs="+", help="annotated edits (enables agreement)")
    ea.add_argument("--out")
    ea.set_defaults(func=cmd_eval_annotations)

    ep = sub.add_parser("eval-phrases", help="exact match@k and embedding similarity@1")
    ep.add_argument("--proposals", required=True, help="JSONL record_id + ranked phrases")
    ep.add_argument("--gold", nargs="+", required=True, help="edits holding the gold phrases")
    ep.add_argument("--k", type=int, default=10)
    ep.add_argument("--embeddings")
    ep.add_argument("--out")
    ep.set_defaults(func=cmd_eval_phrases)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.ERROR if args.quiet else (logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"atomedit: error: {exc}", file=sys.stderr)
        return 2
    except (FatalError, OSError, ValueError) as exc:
        print(f"atomedit: fatal: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

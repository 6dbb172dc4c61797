"""Command-line entry point wiring all batch jobs.

Subcommands: generate, stats, anchors, search, index, isearch, eval, bench.
Diagnostics go to stderr, data to stdout or the requested files. Exit codes:
0 success, 1 usage error, 2 data or integrity error. Every file-producing run
writes its resolved configuration to ``<out>.meta`` so it can be replayed
exactly.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path
from typing import Mapping

from . import anchors as anchors_mod
from . import bench as bench_mod
from .baseline import build_index, index_search, load_index, save_index
from .corpus import Document, generate_synthetic, read_corpus, read_queries, write_corpus
from .engine import ShuffleStats
from .errors import MirexError
from .evaluation import mean_average_precision, precision_at_k, read_qrels, read_run, write_run
from .scoring import ScoringParams
from .search import DEFAULT_TOP_K, sequential_search
from .textstats import compute_stats, load_stats, save_stats

__all__ = ["main", "entry", "write_run_metadata"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit code 1, not argparse's 2
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _default_workers() -> int:
    env = os.environ.get("MIREX_WORKERS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise MirexError(f"MIREX_WORKERS must be an integer, got {env!r}") from None
        if value < 1:
            raise MirexError(f"MIREX_WORKERS must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def _resolve_parallelism(args) -> tuple[int, int]:
    workers = args.workers if args.workers is not None else _default_workers()
    shards = args.shards if args.shards is not None else 4 * workers
    return workers, shards


def write_run_metadata(
    config: Mapping[str, object],
    shuffle: ShuffleStats | None,
    timings: Mapping[str, float],
    path: str | Path,
) -> None:
    """Key-value metadata: config.* keys capture the resolved run
    configuration, shuffle.* the combiner instrumentation, timing.* wall
    clocks. config.* plus the input files fully determine the output."""
    lines = []
    for key in sorted(config):
        lines.append(f"config.{key}={config[key]}")
    if shuffle is not None:
        lines.append(f"shuffle.records_after_combine={shuffle.records_after_combine}")
        lines.append(f"shuffle.records_emitted_by_maps={shuffle.records_emitted_by_maps}")
        lines.append(f"shuffle.max_per_key_after_combine={shuffle.max_per_key()}")
    for key in sorted(timings):
        lines.append(f"timing.{key}={timings[key]:.6f}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def _add_parallel_flags(sub) -> None:
    sub.add_argument("--workers", type=int, default=None,
                     help="worker threads (default: MIREX_WORKERS or CPU count)")
    sub.add_argument("--shards", type=int, default=None,
                     help="input shards (default: 4 x workers)")


def _add_scoring_flags(sub) -> None:
    sub.add_argument("--lambda", dest="lambda_", type=float, default=0.85,
                     help="smoothing weight in (0,1), default 0.85")
    sub.add_argument("--no-length-prior", dest="length_prior", action="store_false",
                     help="disable the document-length prior")
    sub.add_argument("--strip-html", action="store_true",
                     help="remove markup before tokenizing (must match the stats run)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mirex", description="Batch sequential-scan retrieval experiments")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    sub = commands.add_parser("generate", parents=[], help="write a synthetic corpus")
    sub.add_argument("--docs", type=int, required=True)
    sub.add_argument("--vocab", type=int, required=True)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--link-fraction", type=float, default=0.25)
    sub.add_argument("--out", required=True)

    sub = commands.add_parser("stats", help="compute collection statistics")
    sub.add_argument("--corpus", required=True)
    sub.add_argument("--out", required=True)
    sub.add_argument("--strip-html", action="store_true")
    _add_parallel_flags(sub)

    sub = commands.add_parser("anchors", help="extract an anchor-text corpus")
    sub.add_argument("--corpus", required=True)
    sub.add_argument("--out", required=True)
    sub.add_argument("--max-anchor-tokens", type=int, default=anchors_mod.DEFAULT_ANCHOR_TOKEN_CAP)
    _add_parallel_flags(sub)

    sub = commands.add_parser("search", help="sequential scan over the corpus")
    sub.add_argument("--corpus", required=True)
    sub.add_argument("--queries", required=True)
    sub.add_argument("--stats", required=True)
    sub.add_argument("--topk", type=int, default=DEFAULT_TOP_K)
    sub.add_argument("--run-tag", required=True)
    sub.add_argument("--out", required=True)
    sub.add_argument("--no-combine", dest="combine", action="store_false",
                     help="disable the local combiner (instrumentation only)")
    _add_scoring_flags(sub)
    _add_parallel_flags(sub)

    sub = commands.add_parser("index", help="build and save the inverted index")
    sub.add_argument("--corpus", required=True)
    sub.add_argument("--out", required=True)
    sub.add_argument("--strip-html", action="store_true")

    sub = commands.add_parser("isearch", help="query the inverted-index baseline")
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--index")
    source.add_argument("--corpus")
    sub.add_argument("--queries", required=True)
    sub.add_argument("--topk", type=int, default=DEFAULT_TOP_K)
    sub.add_argument("--run-tag", required=True)
    sub.add_argument("--out", required=True)
    _add_scoring_flags(sub)

    sub = commands.add_parser("eval", help="score a run file against qrels")
    sub.add_argument("--run", required=True)
    sub.add_argument("--qrels", required=True)
    sub.add_argument("--cutoff", type=int, default=1000)

    sub = commands.add_parser("bench", help="query-set-size scaling benchmark")
    sub.add_argument("--corpus", required=True)
    sub.add_argument("--queries", required=True, help="query pool to sample from")
    sub.add_argument("--sizes", default="10,100,1000", help="comma-separated ascending sizes")
    sub.add_argument("--trials", type=int, default=3)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--nested", action="store_true",
                     help="smaller query sets are prefixes of larger ones")
    sub.add_argument("--topk", type=int, default=DEFAULT_TOP_K)
    sub.add_argument("--out", default=None, help="CSV path (default: stdout)")
    sub.add_argument("--plot", default=None, help="also render the scaling figure here")
    _add_scoring_flags(sub)
    _add_parallel_flags(sub)

    return parser


def _cmd_generate(args) -> int:
    docs = generate_synthetic(args.docs, args.vocab, args.seed, args.link_fraction)
    write_corpus(docs, args.out)
    start = 0.0
    write_run_metadata(
        {
            "subcommand": "generate",
            "docs": args.docs,
            "vocab": args.vocab,
            "seed": args.seed,
            "link_fraction": args.link_fraction,
            "out": args.out,
        },
        None,
        {"total_seconds": start},
        args.out + ".meta",
    )
    print(f"wrote {args.docs} documents to {args.out}", file=sys.stderr)
    return 0


def _cmd_stats(args) -> int:
    workers, shard_count = _resolve_parallelism(args)
    started = time.perf_counter()
    shards = read_corpus(args.corpus, shard_count)
    stats = compute_stats(shards, workers, strip_html=args.strip_html)
    save_stats(stats, args.out)
    write_run_metadata(
        {
            "subcommand": "stats",
            "corpus": args.corpus,
            "strip_html": args.strip_html,
            "workers": workers,
            "shards": shard_count,
            "out": args.out,
        },
        None,
        {"total_seconds": time.perf_counter() - started},
        args.out + ".meta",
    )
    print(
        f"{stats.doc_count} docs, {stats.total_tokens} tokens, {len(stats.cf)} terms",
        file=sys.stderr,
    )
    return 0


def _cmd_anchors(args) -> int:
    workers, shard_count = _resolve_parallelism(args)
    started = time.perf_counter()
    shards = read_corpus(args.corpus, shard_count)
    url_by_doc = {
        doc.doc_id: doc.url for shard in shards for doc in shard.records
    }
    anchor_docs, coverage = anchors_mod.build_anchor_corpus(
        shards, workers, max_anchor_tokens=args.max_anchor_tokens
    )
    write_corpus(
        [Document(a.doc_id, url_by_doc[a.doc_id], a.text) for a in anchor_docs],
        args.out,
    )
    write_run_metadata(
        {
            "subcommand": "anchors",
            "corpus": args.corpus,
            "max_anchor_tokens": args.max_anchor_tokens,
            "workers": workers,
            "shards": shard_count,
            "coverage": f"{coverage:.6f}",
            "out": args.out,
        },
        None,
        {"total_seconds": time.perf_counter() - started},
        args.out + ".meta",
    )
    print(f"coverage={coverage:.6f}")
    return 0


def _cmd_search(args) -> int:
    workers, shard_count = _resolve_parallelism(args)
    params = ScoringParams(lambda_=args.lambda_, length_prior=args.length_prior)
    started = time.perf_counter()
    shards = read_corpus(args.corpus, shard_count)
    queries = read_queries(args.queries)
    stats = load_stats(args.stats)
    job_started = time.perf_counter()
    results, shuffle = sequential_search(
        shards,
        queries,
        stats,
        params,
        k=args.topk,
        worker_count=workers,
        use_combiner=args.combine,
        strip_html=args.strip_html,
    )
    job_seconds = time.perf_counter() - job_started
    Path(args.out).write_text(write_run(results, args.run_tag), encoding="utf-8")
    write_run_metadata(
        {
            "subcommand": "search",
            "corpus": args.corpus,
            "queries": args.queries,
            "stats": args.stats,
            "topk": args.topk,
            "lambda": args.lambda_,
            "length_prior": args.length_prior,
            "strip_html": args.strip_html,
            "combine": args.combine,
            "workers": workers,
            "shards": shard_count,
            "run_tag": args.run_tag,
            "out": args.out,
        },
        shuffle,
        {"total_seconds": time.perf_counter() - started, "job_seconds": job_seconds},
        args.out + ".meta",
    )
    print(f"wrote run for {len(queries)} queries to {args.out}", file=sys.stderr)
    return 0


def _cmd_index(args) -> int:
    started = time.perf_counter()
    shards = read_corpus(args.corpus, 1)
    index = build_index(shards, strip_html=args.strip_html)
    save_index(index, args.out)
    write_run_metadata(
        {
            "subcommand": "index",
            "corpus": args.corpus,
            "strip_html": args.strip_html,
            "out": args.out,
        },
        None,
        {"total_seconds": time.perf_counter() - started},
        args.out + ".meta",
    )
    print(f"indexed {index.stats.doc_count} docs, {len(index.postings)} terms", file=sys.stderr)
    return 0


def _cmd_isearch(args) -> int:
    params = ScoringParams(lambda_=args.lambda_, length_prior=args.length_prior)
    started = time.perf_counter()
    if args.index:
        index = load_index(args.index)
    else:
        index = build_index(read_corpus(args.corpus, 1), strip_html=args.strip_html)
    queries = read_queries(args.queries)
    results = {q.query_id: index_search(index, q, params, args.topk) for q in queries}
    Path(args.out).write_text(write_run(results, args.run_tag), encoding="utf-8")
    write_run_metadata(
        {
            "subcommand": "isearch",
            "index": args.index or "",
            "corpus": args.corpus or "",
            "queries": args.queries,
            "topk": args.topk,
            "lambda": args.lambda_,
            "length_prior": args.length_prior,
            "strip_html": args.strip_html,
            "run_tag": args.run_tag,
            "out": args.out,
        },
        None,
        {"total_seconds": time.perf_counter() - started},
        args.out + ".meta",
    )
    print(f"wrote run for {len(queries)} queries to {args.out}", file=sys.stderr)
    return 0


def _cmd_eval(args) -> int:
    run = read_run(args.run)
    qrels = read_qrels(args.qrels)
    rows = []
    for k in (5, 10, 20):
        _, mean = precision_at_k(run, qrels, k)
        rows.append((f"P@{k}", mean))
    rows.append(("MAP", mean_average_precision(run, qrels, cutoff=args.cutoff)))
    width = max(len(name) for name, _ in rows)
    print(f"queries judged: {len(qrels.judged_queries())}")
    for name, value in rows:
        print(f"{name:<{width}}  {value:.4f}")
    return 0


def _cmd_bench(args) -> int:
    workers, shard_count = _resolve_parallelism(args)
    params = ScoringParams(lambda_=args.lambda_, length_prior=args.length_prior)
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError:
        raise UsageError(f"--sizes must be comma-separated integers, got {args.sizes!r}") from None
    started = time.perf_counter()
    pool = read_queries(args.queries)
    points = bench_mod.run_bench(
        args.corpus,
        pool,
        sizes,
        trials=args.trials,
        seed=args.seed,
        params=params,
        k=args.topk,
        worker_count=workers,
        shard_count=shard_count,
        nested=args.nested,
        strip_html=args.strip_html,
    )
    csv_text = bench_mod.emit_csv(points)
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
        write_run_metadata(
            {
                "subcommand": "bench",
                "corpus": args.corpus,
                "queries": args.queries,
                "sizes": args.sizes,
                "trials": args.trials,
                "seed": args.seed,
                "nested": args.nested,
                "topk": args.topk,
                "lambda": args.lambda_,
                "length_prior": args.length_prior,
                "strip_html": args.strip_html,
                "workers": workers,
                "shards": shard_count,
                "out": args.out,
            },
            None,
            {"total_seconds": time.perf_counter() - started},
            args.out + ".meta",
        )
    else:
        sys.stdout.write(csv_text)
    if args.plot:
        bench_mod.plot_points(points, args.plot)
        print(f"wrote figure to {args.plot}", file=sys.stderr)
    for (system, size), (wall, per_query) in sorted(bench_mod.mean_by_cell(points).items()):
        print(f"{system} n={size}: mean {wall:.3f}s total, {per_query:.4f}s/query", file=sys.stderr)
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "stats": _cmd_stats,
    "anchors": _cmd_anchors,
    "search": _cmd_search,
    "index": _cmd_index,
    "isearch": _cmd_isearch,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except MirexError as exc:
        print(f"mirex: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"mirex: i/o error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

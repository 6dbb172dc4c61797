"""Query-set-size scaling benchmark: scan system vs inverted-index baseline.

For each (size, trial) cell a seeded query subset is drawn from the pool,
then a full sequential-search run and a full loop of per-query index
searches are wall-clocked. Scan timing includes the per-run corpus read
(that recurring cost is the thing under study); collection statistics and
the baseline's index build happen once, before any timing starts. Results
go to CSV and, optionally, a two-panel figure.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .baseline import build_index, index_search
from .corpus import Query, read_corpus
from .errors import ConfigurationError, FormatError
from .scoring import ScoringParams
from .search import DEFAULT_TOP_K, sequential_search
from .textstats import compute_stats

__all__ = ["BenchPoint", "run_bench", "emit_csv", "parse_csv", "mean_by_cell", "plot_points"]

CSV_HEADER = "system,query_count,trial,wall_seconds,per_query_seconds"
SYSTEMS = ("scan", "baseline")


@dataclass(frozen=True)
class BenchPoint:
    system: str
    query_count: int
    trial: int
    wall_seconds: float
    per_query_seconds: float

    def __post_init__(self) -> None:
        if self.system not in SYSTEMS:
            raise ConfigurationError(f"unknown system {self.system!r}")
        if self.query_count < 1:
            raise ConfigurationError("query_count must be >= 1")
        if self.wall_seconds <= 0:
            raise ConfigurationError("wall_seconds must be > 0")


def _point(system: str, size: int, trial: int, wall: float) -> BenchPoint:
    wall = max(wall, 1e-9)
    return BenchPoint(system, size, trial, wall, wall / size)


def select_queries(
    pool: Sequence[Query], size: int, trial: int, seed: int, nested: bool
) -> list[Query]:
    """Seeded subset without replacement; in nested mode smaller sizes are
    prefixes of larger ones within the same trial."""
    if nested:
        rng = random.Random(f"{seed}:trial{trial}")
        order = list(pool)
        rng.shuffle(order)
        return order[:size]
    rng = random.Random(f"{seed}:{size}:{trial}")
    return rng.sample(list(pool), size)


def run_bench(
    corpus_path: str | Path,
    pool: Sequence[Query],
    sizes: Sequence[int],
    trials: int = 3,
    seed: int = 0,
    params: ScoringParams | None = None,
    k: int = DEFAULT_TOP_K,
    worker_count: int = 1,
    shard_count: int | None = None,
    nested: bool = False,
    strip_html: bool = False,
) -> list[BenchPoint]:
    """Time both systems across query-set sizes, ``trials`` runs per cell."""
    if params is None:
        params = ScoringParams()
    if trials < 1:
        raise ConfigurationError(f"trials must be >= 1, got {trials}")
    if not sizes:
        raise ConfigurationError("no benchmark sizes given")
    if list(sizes) != sorted(sizes):
        raise ConfigurationError("sizes must be ascending")
    for size in sizes:
        if not 1 <= size <= len(pool):
            raise ConfigurationError(
                f"size {size} outside the query pool range [1, {len(pool)}]"
            )
    if shard_count is None:
        shard_count = 4 * worker_count

    # One-time setup, excluded from all timings: statistics for both systems,
    # a resident corpus and the prebuilt index for the baseline.
    shards = read_corpus(corpus_path, shard_count)
    stats = compute_stats(shards, worker_count, strip_html=strip_html)
    index = build_index(shards, strip_html=strip_html)
    del shards

    points: list[BenchPoint] = []
    for size in sizes:
        for trial in range(1, trials + 1):
            subset = select_queries(pool, size, trial, seed, nested)

            start = time.perf_counter()
            run_shards = read_corpus(corpus_path, shard_count)
            sequential_search(
                run_shards, subset, stats, params, k, worker_count, strip_html=strip_html
            )
            points.append(_point("scan", size, trial, time.perf_counter() - start))
            del run_shards

            start = time.perf_counter()
            for query in subset:
                index_search(index, query, params, k)
            points.append(_point("baseline", size, trial, time.perf_counter() - start))
    return points


def emit_csv(points: Sequence[BenchPoint]) -> str:
    """CSV with rows in (system, query_count, trial) order, 6-decimal floats."""
    ordered = sorted(points, key=lambda p: (p.system, p.query_count, p.trial))
    lines = [CSV_HEADER]
    for p in ordered:
        lines.append(
            f"{p.system},{p.query_count},{p.trial},{p.wall_seconds:.6f},{p.per_query_seconds:.6f}"
        )
    return "".join(line + "\n" for line in lines)


def parse_csv(text: str, source: str = "bench csv") -> list[BenchPoint]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != CSV_HEADER:
        raise FormatError(f"{source}: missing or wrong header")
    points = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise FormatError(f"{source}: line {lineno}: expected 5 columns")
        try:
            point = BenchPoint(
                parts[0], int(parts[1]), int(parts[2]), float(parts[3]), float(parts[4])
            )
        except (ValueError, ConfigurationError) as exc:
            raise FormatError(f"{source}: line {lineno}: {exc}") from None
        if abs(point.per_query_seconds - point.wall_seconds / point.query_count) > 1e-6:
            raise FormatError(
                f"{source}: line {lineno}: per-query seconds inconsistent with quotient"
            )
        points.append(point)
    return points


def mean_by_cell(points: Sequence[BenchPoint]) -> dict[tuple[str, int], tuple[float, float]]:
    """(system, query_count) -> (mean wall seconds, mean per-query seconds)."""
    cells: dict[tuple[str, int], list[float]] = {}
    for p in points:
        cells.setdefault((p.system, p.query_count), []).append(p.wall_seconds)
    return {
        cell: (sum(walls) / len(walls), sum(walls) / len(walls) / cell[1])
        for cell, walls in cells.items()
    }


def plot_points(points: Sequence[BenchPoint], path: str | Path) -> None:
    """Render the scaling figure (total and per-query wall time against query
    set size, one line per system) to an image file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    means = mean_by_cell(points)
    sizes = sorted({size for _, size in means})

    fig, (ax_total, ax_per_query) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    for system, marker in (("scan", "o"), ("baseline", "s")):
        xs = [s for s in sizes if (system, s) in means]
        if not xs:
            continue
        ax_total.plot(xs, [means[(system, s)][0] for s in xs], marker=marker, label=system)
        ax_per_query.plot(xs, [means[(system, s)][1] for s in xs], marker=marker, label=system)

    for ax, ylabel in ((ax_total, "seconds per run"), (ax_per_query, "seconds per query")):
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("queries per batch")
        ax.set_ylabel(ylabel)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
    fig.suptitle("Batch scan vs inverted index across query set sizes")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

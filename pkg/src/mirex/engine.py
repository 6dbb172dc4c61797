"""Generic map-combine-reduce executor over corpus shards.

All batch jobs in this package (collection statistics, sequential search,
anchor extraction) run through :func:`run_job`. The executor guarantees a
deterministic-output contract: for a fixed job and corpus, the output is
identical for any worker count and any assignment of shards to workers.
Parallelism is in-process worker threads; the shuffle is an in-memory
group-by instrumented with counters in place of network traffic.

Determinism rests on three rules:

* each shard's documents are mapped in shard order;
* values reaching reduce for a key are first sorted by the job-supplied
  total order (``value_key``);
* keys are reduced in ascending key order, each key exactly once.

An optional combiner is applied per worker: whenever a worker's buffered
values for one key reach ``combine_limit`` and once more when the worker
finishes, so at most ``worker_count * |combine output|`` records per key
cross the shuffle.
"""

from __future__ import annotations

import dataclasses
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from .corpus import CorpusShard
from .errors import ConfigurationError, JobError

__all__ = ["Job", "ShuffleStats", "run_job", "verify_combiner"]


@dataclass(frozen=True)
class Job:
    """A map/combine/reduce job over documents.

    ``map`` takes a Document and yields (key, value) pairs. ``reduce`` takes a
    key and the full sorted value list and yields output records. ``combine``,
    when present, locally shrinks a value list for one key and must be
    idempotent-compatible: reducing combined values must equal reducing the
    raw values. ``value_key`` is the total order applied to values before
    reduce; None means the values' natural ordering.
    """

    name: str
    map: Callable[[Any], Iterable[tuple[Any, Any]]]
    reduce: Callable[[Any, list[Any]], Iterable[Any]]
    combine: Callable[[Any, list[Any]], list[Any]] | None = None
    value_key: Callable[[Any], Any] | None = None
    combine_limit: int = 8192


@dataclass
class ShuffleStats:
    """Counters standing in for the traffic a cluster shuffle would send."""

    records_emitted_by_maps: int = 0
    records_after_combine: int = 0
    per_key_after_combine: Counter = field(default_factory=Counter)

    def max_per_key(self) -> int:
        return max(self.per_key_after_combine.values(), default=0)


def _apply_combine(job: Job, key: Any, values: list[Any]) -> list[Any]:
    try:
        return list(job.combine(key, values))
    except JobError:
        raise
    except Exception as exc:
        raise JobError(f"job {job.name!r}: combine failed for key {key!r}: {exc}") from exc


def _run_worker(job: Job, shards: Sequence[CorpusShard]) -> tuple[dict[Any, list[Any]], int]:
    buffers: dict[Any, list[Any]] = {}
    emitted = 0
    for shard in shards:
        for doc in shard.records:
            try:
                pairs = list(job.map(doc))
            except Exception as exc:
                raise JobError(
                    f"job {job.name!r}: map failed for doc {doc.doc_id!r} "
                    f"in shard {shard.shard_index}: {exc}"
                ) from exc
            for key, value in pairs:
                emitted += 1
                buf = buffers.setdefault(key, [])
                buf.append(value)
                if job.combine is not None and len(buf) >= job.combine_limit:
                    buffers[key] = _apply_combine(job, key, buf)
    if job.combine is not None:
        for key in buffers:
            buffers[key] = _apply_combine(job, key, buffers[key])
    return buffers, emitted


def run_job(
    job: Job, shards: Sequence[CorpusShard], worker_count: int = 1
) -> tuple[list[Any], ShuffleStats]:
    """Execute a job and return (output records, shuffle counters).

    The call is synchronous; all threading stays inside. Job functions must be
    pure and safe to call from multiple threads. Output records are returned
    in ascending key order and are byte-identical for any ``worker_count``.
    """
    if worker_count < 1:
        raise ConfigurationError(f"worker_count must be >= 1, got {worker_count}")

    assignments = [shards[w::worker_count] for w in range(worker_count)]
    assignments = [a for a in assignments if a]

    if len(assignments) <= 1:
        worker_results = [_run_worker(job, a) for a in assignments]
    else:
        with ThreadPoolExecutor(max_workers=len(assignments)) as pool:
            futures = [pool.submit(_run_worker, job, a) for a in assignments]
            worker_results = [f.result() for f in futures]

    stats = ShuffleStats()
    grouped: dict[Any, list[Any]] = {}
    for buffers, emitted in worker_results:
        stats.records_emitted_by_maps += emitted
        for key, values in buffers.items():
            stats.records_after_combine += len(values)
            stats.per_key_after_combine[key] += len(values)
            grouped.setdefault(key, []).extend(values)

    output: list[Any] = []
    for key in sorted(grouped):
        values = sorted(grouped[key], key=job.value_key) if job.value_key else sorted(grouped[key])
        try:
            records = list(job.reduce(key, values))
        except Exception as exc:
            raise JobError(f"job {job.name!r}: reduce failed for key {key!r}: {exc}") from exc
        output.extend(records)
    return output, stats


def verify_combiner(job: Job, shards: Sequence[CorpusShard], worker_count: int = 4) -> bool:
    """True iff the job's output with the combiner enabled equals the output
    with the combiner disabled. False is a finding about the job, not an error."""
    if job.combine is None:
        raise ConfigurationError(f"job {job.name!r} has no combine function to verify")
    with_combine, _ = run_job(job, shards, worker_count)
    without_combine, _ = run_job(dataclasses.replace(job, combine=None), shards, worker_count)
    return with_combine == without_combine

"""The sequential-search job: one scan over every document scores the whole
query set, with a bounded capacity-K ranked list as both combiner and reducer.

Each mapper tokenizes a document exactly once, then walks the document's
distinct terms in ascending order, probing a prebuilt term -> queries table.
Per query, contributions therefore accumulate in ascending term order, which
keeps the floats bit-identical to :func:`mirex.scoring.score_document` while
letting a 5,000-query set amortize over the single scan.
"""

from __future__ import annotations

import math
from bisect import insort
from collections import Counter
from typing import NamedTuple, Sequence

from .corpus import CorpusShard, Query
from .engine import Job, ShuffleStats, run_job
from .errors import ConfigurationError, IntegrityError
from .scoring import ScoringParams, compile_query_terms, term_weight
from .textstats import CollectionStats, tokenize

__all__ = ["ScoredDoc", "RankedList", "ranked_insert", "sequential_search", "build_search_job"]

DEFAULT_TOP_K = 1000


class ScoredDoc(NamedTuple):
    doc_id: str
    score: float


def _rank_key(entry: ScoredDoc) -> tuple[float, str]:
    return (-entry.score, entry.doc_id)


class RankedList:
    """A capacity-K list of (doc, score), kept ordered by score descending
    with ties broken by ascending doc_id."""

    __slots__ = ("capacity", "_entries", "_members")

    def __init__(self, capacity: int = DEFAULT_TOP_K):
        if capacity < 1:
            raise ConfigurationError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._entries: list[ScoredDoc] = []
        self._members: set[str] = set()

    @classmethod
    def _from_sorted(cls, capacity: int, entries: Sequence[ScoredDoc]) -> "RankedList":
        # Fast path for entries already produced by a RankedList.
        ranked = cls(capacity)
        ranked._entries = list(entries)
        ranked._members = {e.doc_id for e in entries}
        return ranked

    @property
    def entries(self) -> list[ScoredDoc]:
        return list(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RankedList):
            return NotImplemented
        return self.capacity == other.capacity and self._entries == other._entries

    def __repr__(self) -> str:
        return f"RankedList(capacity={self.capacity}, entries={self._entries!r})"

    def insert(self, candidate: ScoredDoc) -> None:
        """Insert if the list has room or the candidate outranks the current
        minimum; duplicate doc_ids are an integrity error."""
        if candidate.score <= 0:
            raise ValueError(f"candidate score must be > 0, got {candidate.score}")
        if candidate.doc_id in self._members:
            raise IntegrityError(f"doc {candidate.doc_id!r} inserted twice into ranked list")
        if len(self._entries) < self.capacity:
            insort(self._entries, candidate, key=_rank_key)
            self._members.add(candidate.doc_id)
            return
        tail = self._entries[-1]
        if _rank_key(candidate) < _rank_key(tail):
            self._entries.pop()
            self._members.discard(tail.doc_id)
            insort(self._entries, candidate, key=_rank_key)
            self._members.add(candidate.doc_id)


def ranked_insert(ranked: RankedList, candidate: ScoredDoc) -> RankedList:
    """Mutating insert that returns the list, mirroring the job contract."""
    ranked.insert(candidate)
    return ranked


def build_search_job(
    queries: Sequence[Query],
    stats: CollectionStats,
    params: ScoringParams,
    k: int = DEFAULT_TOP_K,
    strip_html: bool = False,
) -> Job:
    """Construct the scan job; the query set is baked in as the per-experiment
    constant. The same top-K logic serves as combiner and reducer."""
    from .anchors import strip_tags

    if not queries:
        raise ConfigurationError("query set is empty")
    seen_ids: set[str] = set()
    term_to_queries: dict[str, list[tuple[str, int]]] = {}
    for query in queries:
        if query.query_id in seen_ids:
            raise IntegrityError(f"duplicate query_id {query.query_id!r} in query set")
        seen_ids.add(query.query_id)
        for term, multiplicity in compile_query_terms(query):
            # Terms absent from the collection can never contribute.
            if stats.cf.get(term, 0) > 0:
                term_to_queries.setdefault(term, []).append((query.query_id, multiplicity))

    if term_to_queries and stats.total_tokens <= 0:
        raise ConfigurationError("collection statistics lack a token total")

    lambda_ = params.lambda_
    total_tokens = stats.total_tokens
    use_prior = params.length_prior
    cf = stats.cf
    log = math.log

    def map_fn(doc):
        text = strip_tags(doc.text) if strip_html else doc.text
        tokens = tokenize(text)
        if not tokens:
            return []
        doc_len = len(tokens)
        tf = Counter(tokens)
        base = log(doc_len) if use_prior else 0.0
        acc: dict[str, float] = {}
        for term in sorted(tf):
            hits = term_to_queries.get(term)
            if hits is None:
                continue
            weight = term_weight(tf[term], cf[term], doc_len, total_tokens, lambda_)
            for query_id, multiplicity in hits:
                acc[query_id] = acc.get(query_id, base) + multiplicity * weight
        doc_id = doc.doc_id
        return [
            (query_id, ScoredDoc(doc_id, score))
            for query_id, score in acc.items()
            if score > 0.0
        ]

    def top_k(key, values):
        ranked = RankedList(k)
        for value in values:
            ranked.insert(value)
        return ranked._entries

    def reduce_fn(key, values):
        return [(key, tuple(top_k(key, values)))]

    return Job(
        name="search",
        map=map_fn,
        reduce=reduce_fn,
        combine=top_k,
        value_key=_rank_key,
        combine_limit=max(2 * k, 64),
    )


def sequential_search(
    shards: Sequence[CorpusShard],
    queries: Sequence[Query],
    stats: CollectionStats,
    params: ScoringParams,
    k: int = DEFAULT_TOP_K,
    worker_count: int = 1,
    use_combiner: bool = True,
    strip_html: bool = False,
) -> tuple[dict[str, RankedList], ShuffleStats]:
    """Scan the corpus once, returning the exact top-K ranked list per query.

    Every query id from the input appears in the result, with an empty list
    when nothing matched. Results are identical for any worker or shard
    count; ``use_combiner=False`` disables local aggregation (for combiner
    soundness checks) without changing the output.
    """
    import dataclasses

    job = build_search_job(queries, stats, params, k, strip_html)
    if not use_combiner:
        job = dataclasses.replace(job, combine=None)
    records, shuffle = run_job(job, shards, worker_count)
    by_query = dict(records)
    results = {
        q.query_id: RankedList._from_sorted(k, by_query.get(q.query_id, ()))
        for q in queries
    }
    return results, shuffle

"""TREC run-file serialization and effectiveness measures (P@k, MAP).

Run files use the community-standard six-column format
``query_id Q0 doc_id rank score run_tag``; qrels files are
``query_id 0 doc_id grade``. Binary relevance means grade >= 1, and retrieved
documents without a judgment count as non-relevant.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, NamedTuple

from .errors import ConfigurationError, FormatError, IntegrityError, ParseError
from .search import RankedList

__all__ = [
    "RunRow",
    "RunFile",
    "Qrels",
    "write_run",
    "parse_run",
    "read_qrels",
    "precision_at_k",
    "mean_average_precision",
]


class RunRow(NamedTuple):
    query_id: str
    doc_id: str
    rank: int
    score: float


@dataclass(frozen=True)
class RunFile:
    run_tag: str
    rows: tuple[RunRow, ...]

    def by_query(self) -> dict[str, list[str]]:
        """Doc ids per query in rank order."""
        grouped: dict[str, list[str]] = {}
        for row in self.rows:
            grouped.setdefault(row.query_id, []).append(row.doc_id)
        return grouped


@dataclass(frozen=True)
class Qrels:
    """Relevance judgments keyed by (query_id, doc_id); grade >= 1 is relevant."""

    judgments: dict[tuple[str, str], int]

    def judged_queries(self) -> list[str]:
        return sorted({query_id for query_id, _ in self.judgments})

    def relevant_total(self, query_id: str) -> int:
        return sum(
            1 for (qid, _), grade in self.judgments.items() if qid == query_id and grade >= 1
        )

    def is_relevant(self, query_id: str, doc_id: str) -> bool:
        return self.judgments.get((query_id, doc_id), 0) >= 1


def write_run(results: Mapping[str, RankedList], run_tag: str) -> str:
    """Render ranked lists as run-file text, queries in ascending id order.

    Scores print with six decimals; queries with empty lists produce no rows.
    """
    if not run_tag or any(c.isspace() for c in run_tag):
        raise ConfigurationError(f"run_tag must be a non-empty token, got {run_tag!r}")
    lines = []
    for query_id in sorted(results):
        for rank, entry in enumerate(results[query_id].entries, start=1):
            lines.append(
                f"{query_id} Q0 {entry.doc_id} {rank} {entry.score:.6f} {run_tag}"
            )
    return "".join(line + "\n" for line in lines)


def parse_run(text: str, source: str = "run") -> RunFile:
    """Parse run text back into rows, validating rank and score monotonicity."""
    rows: list[RunRow] = []
    run_tag = ""
    last_rank: dict[str, int] = {}
    last_score: dict[str, float] = {}
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue
        parts = line.split()
        if len(parts) != 6:
            raise FormatError(
                f"{source}: line {lineno}: expected 6 columns, got {len(parts)}"
            )
        query_id, literal, doc_id, rank_txt, score_txt, tag = parts
        if literal != "Q0":
            raise FormatError(f"{source}: line {lineno}: second column must be Q0")
        try:
            rank = int(rank_txt)
            score = float(score_txt)
        except ValueError:
            raise FormatError(f"{source}: line {lineno}: bad rank or score") from None
        if not run_tag:
            run_tag = tag
        elif tag != run_tag:
            raise FormatError(f"{source}: line {lineno}: mixed run tags {run_tag!r}/{tag!r}")
        expected = last_rank.get(query_id, 0) + 1
        if rank != expected:
            raise FormatError(
                f"{source}: line {lineno}: rank {rank} for query {query_id!r}, expected {expected}"
            )
        if query_id in last_score and score > last_score[query_id]:
            raise FormatError(
                f"{source}: line {lineno}: score increases with rank for query {query_id!r}"
            )
        last_rank[query_id] = rank
        last_score[query_id] = score
        rows.append(RunRow(query_id, doc_id, rank, score))
    return RunFile(run_tag=run_tag, rows=tuple(rows))


def read_run(path: str | Path) -> RunFile:
    return parse_run(Path(path).read_text(encoding="utf-8"), source=str(path))


def read_qrels(path: str | Path) -> Qrels:
    source = str(path)
    judgments: dict[tuple[str, str], int] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(f"{source}: line {lineno}: expected 4 columns, got {len(parts)}")
        query_id, _, doc_id, grade_txt = parts
        try:
            grade = int(grade_txt)
        except ValueError:
            raise ParseError(f"{source}: line {lineno}: bad relevance grade") from None
        if grade < 0:
            raise ParseError(f"{source}: line {lineno}: negative relevance grade")
        key = (query_id, doc_id)
        if key in judgments:
            raise IntegrityError(
                f"{source}: line {lineno}: duplicate judgment for {query_id} {doc_id}"
            )
        judgments[key] = grade
    return Qrels(judgments=judgments)


def _warn_unjudged(run: RunFile, qrels: Qrels) -> None:
    judged = set(qrels.judged_queries())
    for query_id in sorted(run.by_query()):
        if query_id not in judged:
            warnings.warn(f"query {query_id!r} in run but not in qrels; excluded from the mean")


def precision_at_k(run: RunFile, qrels: Qrels, k: int) -> tuple[dict[str, float], float]:
    """Per-query and mean P@k over the judged queries.

    Missing ranks count as non-relevant (the divisor is always k); a judged
    query with nothing retrieved scores 0. Queries only in the run are warned
    about and excluded.
    """
    if k < 1:
        raise ConfigurationError(f"k must be >= 1, got {k}")
    judged = qrels.judged_queries()
    if not judged:
        raise ConfigurationError("qrels contain no judged queries")
    _warn_unjudged(run, qrels)
    retrieved = run.by_query()
    per_query: dict[str, float] = {}
    for query_id in judged:
        top = retrieved.get(query_id, [])[:k]
        hits = sum(1 for doc_id in top if qrels.is_relevant(query_id, doc_id))
        per_query[query_id] = hits / k
    mean = sum(per_query.values()) / len(per_query)
    return per_query, mean


def mean_average_precision(run: RunFile, qrels: Qrels, cutoff: int = 1000) -> float:
    """MAP over the judged queries with the given rank cutoff.

    Average precision per query is the mean of precision at each relevant
    retrieved rank, divided by the number of relevant documents in the qrels;
    queries without any relevant judgment contribute 0 with a warning.
    """
    judged = qrels.judged_queries()
    if not judged:
        raise ConfigurationError("qrels contain no judged queries")
    _warn_unjudged(run, qrels)
    retrieved = run.by_query()
    ap_values = []
    for query_id in judged:
        relevant_total = qrels.relevant_total(query_id)
        if relevant_total == 0:
            warnings.warn(f"query {query_id!r} has no relevant documents in qrels; AP set to 0")
            ap_values.append(0.0)
            continue
        hits = 0
        precision_sum = 0.0
        for rank, doc_id in enumerate(retrieved.get(query_id, [])[:cutoff], start=1):
            if qrels.is_relevant(query_id, doc_id):
                hits += 1
                precision_sum += hits / rank
        ap_values.append(precision_sum / relevant_total)
    return sum(ap_values) / len(ap_values)

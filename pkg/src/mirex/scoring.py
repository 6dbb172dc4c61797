"""Query-likelihood scoring: a linearly smoothed unigram language model with
an additive document-length prior.

The smoothed likelihood is rewritten as a sum over matching terms, dropping
the rank-invariant constant, so every matching document's score is strictly
positive and absence of a score means "no query term occurs here":

    score(q, d) = log|d|                                   (length prior)
                + sum over distinct query terms t present in d of
                      m(t) * log(1 + lam * tf(t,d) * |C|
                                     / ((1 - lam) * cf(t) * |d|))

with m(t) the term's multiplicity in the query, tf the in-document count,
cf the collection count and |C| the collection token total. Terms are summed
in ascending order so scores are bit-identical across worker schedules.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import Document, Query
from .errors import ConfigurationError
from .textstats import CollectionStats, tokenize

__all__ = ["ScoringParams", "term_weight", "score_document", "rank_order_check"]


@dataclass(frozen=True)
class ScoringParams:
    """Smoothing weight in (0, 1) and the length-prior toggle."""

    lambda_: float = 0.85
    length_prior: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.lambda_ < 1.0:
            raise ConfigurationError(f"lambda must be in (0, 1), got {self.lambda_}")


def term_weight(tf: int, cf: int, doc_len: int, total_tokens: int, lambda_: float) -> float:
    """Per-term score contribution for one occurrence of the term in the query.

    Strictly positive for tf >= 1. All callers (scan mapper, brute scorer,
    inverted baseline) share this expression so their floats are bit-equal.
    """
    return math.log(1.0 + (lambda_ * tf * total_tokens) / ((1.0 - lambda_) * cf * doc_len))


def compile_query_terms(query: Query) -> list[tuple[str, int]]:
    """Tokenize a query into (term, multiplicity) pairs in ascending term
    order; raises if the query has no tokens."""
    counts = Counter(tokenize(query.text))
    if not counts:
        raise ConfigurationError(f"query {query.query_id!r} has no tokens")
    return sorted(counts.items())


def score_document(
    query: Query,
    doc_tokens: Sequence[str],
    doc_id: str,
    stats: CollectionStats,
    params: ScoringParams,
) -> float | None:
    """Score one document against one query, or None when nothing matches.

    None exactly when no query term with cf > 0 occurs in the document (the
    positive-score gate of the scan). A returned value is always > 0.
    """
    query_terms = compile_query_terms(query)
    doc_len = len(doc_tokens)
    if doc_len == 0:
        return None
    tf = Counter(doc_tokens)
    score = math.log(doc_len) if params.length_prior else 0.0
    matched = False
    for term, multiplicity in query_terms:
        count = tf.get(term, 0)
        if count == 0:
            continue
        cf = stats.cf.get(term, 0)
        if cf <= 0:
            continue
        if stats.total_tokens <= 0:
            raise ConfigurationError(
                f"collection statistics lack a token total; cannot score doc {doc_id!r}"
            )
        score = score + multiplicity * term_weight(
            count, cf, doc_len, stats.total_tokens, params.lambda_
        )
        matched = True
    return score if matched else None


def rank_order_check(
    query: Query,
    docs: Sequence[Document],
    stats: CollectionStats,
    params: ScoringParams,
) -> list[str]:
    """Doc ids of all matching documents ordered by (score desc, doc_id asc).

    Test helper: full-ordering comparisons between the scan and the inverted
    baseline go through this.
    """
    scored = []
    for doc in docs:
        score = score_document(query, tokenize(doc.text), doc.doc_id, stats, params)
        if score is not None:
            scored.append((doc.doc_id, score))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return [doc_id for doc_id, _ in scored]

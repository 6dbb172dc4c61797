"""Shared helpers for the test suite."""

from __future__ import annotations

import random

from mirex.corpus import Document, Query, shard_documents
from mirex.scoring import score_document
from mirex.textstats import tokenize


def docs_from(mapping: dict[str, str], url_prefix: str = "") -> list[Document]:
    """Documents from a {doc_id: text} mapping; urls optional."""
    return [
        Document(doc_id, f"{url_prefix}{doc_id}" if url_prefix else "", text)
        for doc_id, text in mapping.items()
    ]


def shards_from(mapping: dict[str, str], shard_count: int = 1):
    return shard_documents(docs_from(mapping), shard_count)


def corpus_queries(docs, count: int, seed: int, oov_every: int = 0) -> list[Query]:
    """Build queries of 1-3 terms drawn from the corpus vocabulary; every
    ``oov_every``-th query (when > 0) is an out-of-vocabulary miss."""
    rng = random.Random(seed)
    vocabulary = sorted({t for d in docs for t in tokenize(d.text)})
    queries = []
    for i in range(count):
        if oov_every and i % oov_every == oov_every - 1:
            text = f"zzzmiss{i}"
        else:
            text = " ".join(rng.choice(vocabulary) for _ in range(rng.randint(1, 3)))
        queries.append(Query(f"q{i:04d}", text))
    return queries


def brute_force_top_k(docs, query, stats, params, k):
    """All-pairs scoring oracle: score every document via score_document,
    full sort under (score desc, doc_id asc), truncate to k."""
    scored = []
    for doc in docs:
        score = score_document(query, tokenize(doc.text), doc.doc_id, stats, params)
        if score is not None:
            scored.append((doc.doc_id, score))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]

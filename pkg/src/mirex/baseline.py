"""In-memory inverted-index searcher over the identical scoring model.

This is the single-node index-based opponent of the scan system: the same
tokenizer, the same statistics, the same per-term weight function, summed in
the same ascending-term order, so its scores are bit-comparable with
sequential search. It exists as an equivalence oracle and benchmark
counterpart, not as a production index (no compression, no skip lists,
no caching).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import CorpusShard, Query, escape_field, unescape_field
from .errors import ConfigurationError, FormatError, IntegrityError
from .scoring import ScoringParams, compile_query_terms, term_weight
from .search import RankedList, ScoredDoc, DEFAULT_TOP_K
from .textstats import CollectionStats, tokenize

__all__ = ["InvertedIndex", "build_index", "index_search", "save_index", "load_index"]

_INDEX_MAGIC = "mirex.index"
_INDEX_VERSION = "1"


@dataclass(frozen=True)
class InvertedIndex:
    """Postings sorted by doc_id per term, document lengths, and the embedded
    collection statistics. Immutable after build; concurrent queries are fine."""

    postings: dict[str, list[tuple[str, int]]]
    doc_len: dict[str, int]
    stats: CollectionStats


def build_index(shards: Sequence[CorpusShard], strip_html: bool = False) -> InvertedIndex:
    """Index every document; embedded stats equal compute_stats of the corpus."""
    from .anchors import strip_tags

    postings: dict[str, dict[str, int]] = {}
    doc_len: dict[str, int] = {}
    for shard in shards:
        for doc in shard.records:
            if doc.doc_id in doc_len:
                raise IntegrityError(f"duplicate doc_id {doc.doc_id!r} while indexing")
            text = strip_tags(doc.text) if strip_html else doc.text
            tokens = tokenize(text)
            doc_len[doc.doc_id] = len(tokens)
            for term, count in Counter(tokens).items():
                postings.setdefault(term, {})[doc.doc_id] = count

    sorted_postings = {
        term: sorted(by_doc.items()) for term, by_doc in postings.items()
    }
    cf = {term: sum(tf for _, tf in plist) for term, plist in sorted_postings.items()}
    stats = CollectionStats(
        total_tokens=sum(cf.values()),
        doc_count=len(doc_len),
        cf=cf,
        doc_len=dict(doc_len),
    )
    return InvertedIndex(postings=sorted_postings, doc_len=doc_len, stats=stats)


def index_search(
    index: InvertedIndex,
    query: Query,
    params: ScoringParams,
    k: int = DEFAULT_TOP_K,
) -> RankedList:
    """Term-at-a-time search returning the exact top-K under the shared
    (score desc, doc_id asc) order. Matches sequential_search bit for bit."""
    query_terms = compile_query_terms(query)
    total_tokens = index.stats.total_tokens
    use_prior = params.length_prior
    acc: dict[str, float] = {}
    for term, multiplicity in query_terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        cf = index.stats.cf[term]
        if total_tokens <= 0:
            raise ConfigurationError("index statistics lack a token total")
        for doc_id, tf in plist:
            doc_len = index.doc_len[doc_id]
            weight = term_weight(tf, cf, doc_len, total_tokens, params.lambda_)
            base = acc.get(doc_id)
            if base is None:
                base = math.log(doc_len) if use_prior else 0.0
            acc[doc_id] = base + multiplicity * weight

    ranked = RankedList(k)
    for doc_id, score in acc.items():
        if score > 0.0:
            ranked.insert(ScoredDoc(doc_id, score))
    return ranked


def save_index(index: InvertedIndex, path: str | Path) -> None:
    """Single-file persistence: header, length section, postings section."""
    stats = index.stats
    lines = [f"{_INDEX_MAGIC}\t{_INDEX_VERSION}\t{stats.total_tokens}\t{stats.doc_count}"]
    for doc_id in sorted(index.doc_len):
        lines.append(f"len\t{escape_field(doc_id)}\t{index.doc_len[doc_id]}")
    for term in sorted(index.postings):
        for doc_id, tf in index.postings[term]:
            lines.append(f"post\t{escape_field(term)}\t{escape_field(doc_id)}\t{tf}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_index(path: str | Path) -> InvertedIndex:
    source = str(path)
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError(f"{source}: empty index file")

    header = lines[0].split("\t")
    if len(header) != 4 or header[0] != _INDEX_MAGIC:
        raise FormatError(f"{source}: not an index file (bad header)")
    if header[1] != _INDEX_VERSION:
        raise FormatError(f"{source}: unsupported index version {header[1]!r}")
    try:
        total_tokens, doc_count = int(header[2]), int(header[3])
    except ValueError:
        raise FormatError(f"{source}: non-integer totals in header") from None

    doc_len: dict[str, int] = {}
    postings: dict[str, list[tuple[str, int]]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        try:
            if len(parts) == 3 and parts[0] == "len":
                doc_id = unescape_field(parts[1])
                if doc_id in doc_len:
                    raise FormatError(f"{source}: line {lineno}: duplicate length for {doc_id!r}")
                doc_len[doc_id] = int(parts[2])
            elif len(parts) == 4 and parts[0] == "post":
                term, doc_id = unescape_field(parts[1]), unescape_field(parts[2])
                plist = postings.setdefault(term, [])
                if plist and plist[-1][0] >= doc_id:
                    raise FormatError(
                        f"{source}: line {lineno}: postings for {term!r} out of doc_id order"
                    )
                plist.append((doc_id, int(parts[3])))
            else:
                raise FormatError(f"{source}: line {lineno}: malformed index row")
        except ValueError as exc:
            raise FormatError(f"{source}: line {lineno}: {exc}") from None

    for term, plist in postings.items():
        for doc_id, _ in plist:
            if doc_id not in doc_len:
                raise FormatError(f"{source}: posting references unknown doc {doc_id!r}")

    cf = {term: sum(tf for _, tf in plist) for term, plist in postings.items()}
    if sum(cf.values()) != total_tokens or sum(doc_len.values()) != total_tokens:
        raise FormatError(f"{source}: token counts do not sum to header total")
    if len(doc_len) != doc_count:
        raise FormatError(f"{source}: document count does not match header")
    stats = CollectionStats(
        total_tokens=total_tokens, doc_count=doc_count, cf=cf, doc_len=dict(doc_len)
    )
    return InvertedIndex(postings=postings, doc_len=doc_len, stats=stats)

"""Tokenization and the corpus-statistics pass feeding the scoring model.

Tokens are maximal runs of Unicode alphanumeric characters, lowercased.
No stemming, no stopword removal. The statistics pass runs as an engine
job and yields the collection term frequencies and per-document lengths
the smoothed language model needs.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import CorpusShard, escape_field, unescape_field
from .engine import Job, run_job
from .errors import FormatError

__all__ = ["tokenize", "CollectionStats", "compute_stats", "save_stats", "load_stats"]

# \w minus underscore: Unicode letters and digits only.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

_STATS_MAGIC = "mirex.stats"
_STATS_VERSION = "1"


def tokenize(text: str) -> list[str]:
    """Split text into lowercased maximal alphanumeric runs, in order."""
    return [t.lower() for t in _TOKEN_RE.findall(text)]


@dataclass(frozen=True)
class CollectionStats:
    """Corpus-wide counts. Treated as read-only once built; safe to share
    across worker threads."""

    total_tokens: int = 0
    doc_count: int = 0
    cf: dict[str, int] = field(default_factory=dict)
    doc_len: dict[str, int] = field(default_factory=dict)


def _stats_job(strip_html: bool) -> Job:
    from .anchors import strip_tags

    def map_fn(doc):
        text = strip_tags(doc.text) if strip_html else doc.text
        tokens = tokenize(text)
        pairs = [(("len", doc.doc_id), len(tokens))]
        for term, count in Counter(tokens).items():
            pairs.append((("cf", term), count))
        return pairs

    def sum_values(key, values):
        return [sum(values)]

    def reduce_fn(key, values):
        return [(key, sum(values))]

    return Job(name="stats", map=map_fn, reduce=reduce_fn, combine=sum_values)


def compute_stats(
    shards: Sequence[CorpusShard], worker_count: int = 1, strip_html: bool = False
) -> CollectionStats:
    """Count cf(term) and per-document token lengths across the corpus.

    Invariant under worker and shard counts. With ``strip_html`` the tag
    removal used by the anchor scanner is applied before tokenizing, so the
    statistics match a search over the stripped representation.
    """
    records, _ = run_job(_stats_job(strip_html), shards, worker_count)
    cf: dict[str, int] = {}
    doc_len: dict[str, int] = {}
    for (kind, name), value in records:
        if kind == "cf":
            cf[name] = value
        else:
            doc_len[name] = value
    return CollectionStats(
        total_tokens=sum(cf.values()),
        doc_count=len(doc_len),
        cf=cf,
        doc_len=doc_len,
    )


def save_stats(stats: CollectionStats, path: str | Path) -> None:
    lines = [f"{_STATS_MAGIC}\t{_STATS_VERSION}\t{stats.total_tokens}\t{stats.doc_count}"]
    for term in sorted(stats.cf):
        lines.append(f"cf\t{escape_field(term)}\t{stats.cf[term]}")
    for doc_id in sorted(stats.doc_len):
        lines.append(f"len\t{escape_field(doc_id)}\t{stats.doc_len[doc_id]}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_stats(path: str | Path) -> CollectionStats:
    """Load statistics, rejecting version mismatches and truncated files."""
    source = str(path)
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError(f"{source}: empty statistics file")

    header = lines[0].split("\t")
    if len(header) != 4 or header[0] != _STATS_MAGIC:
        raise FormatError(f"{source}: not a statistics file (bad header)")
    if header[1] != _STATS_VERSION:
        raise FormatError(f"{source}: unsupported statistics version {header[1]!r}")
    try:
        total_tokens, doc_count = int(header[2]), int(header[3])
    except ValueError:
        raise FormatError(f"{source}: non-integer totals in header") from None

    cf: dict[str, int] = {}
    doc_len: dict[str, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != 3 or parts[0] not in ("cf", "len"):
            raise FormatError(f"{source}: line {lineno}: malformed statistics row")
        try:
            name, value = unescape_field(parts[1]), int(parts[2])
        except ValueError as exc:
            raise FormatError(f"{source}: line {lineno}: {exc}") from None
        section = cf if parts[0] == "cf" else doc_len
        if name in section:
            raise FormatError(f"{source}: line {lineno}: duplicate {parts[0]} entry {name!r}")
        section[name] = value

    # Conservation catches truncated or hand-edited files.
    if sum(cf.values()) != total_tokens or sum(doc_len.values()) != total_tokens:
        raise FormatError(f"{source}: token counts do not sum to header total")
    if len(doc_len) != doc_count:
        raise FormatError(f"{source}: document count does not match header")
    return CollectionStats(total_tokens=total_tokens, doc_count=doc_count, cf=cf, doc_len=doc_len)

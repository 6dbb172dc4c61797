"""Document and query data model, the escaped-TSV corpus format, round-robin
sharding, and a seeded synthetic corpus generator for desk-scale runs.

Corpus files hold one record per line: ``doc_id<TAB>url<TAB>text``. Tabs,
newlines and backslashes inside fields are escaped as ``\\t``, ``\\n`` and
``\\\\``; a ``.gz`` suffix means the file is gzip-compressed. Query files are
plain ``query_id<TAB>text`` lines.
"""

from __future__ import annotations

import gzip
import random
from dataclasses import dataclass
from itertools import accumulate
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigurationError, IntegrityError, ParseError

__all__ = [
    "Document",
    "Query",
    "CorpusShard",
    "read_corpus",
    "write_corpus",
    "read_queries",
    "shard_documents",
    "merge_shards",
    "generate_synthetic",
    "escape_field",
    "unescape_field",
]


@dataclass(frozen=True)
class Document:
    """One corpus record: opaque id, absolute URL (may be empty), raw text."""

    doc_id: str
    url: str
    text: str

    def __post_init__(self) -> None:
        if not self.doc_id or any(c.isspace() for c in self.doc_id):
            raise IntegrityError(
                f"doc_id must be a non-empty token without whitespace: {self.doc_id!r}"
            )


@dataclass(frozen=True)
class Query:
    query_id: str
    text: str

    def __post_init__(self) -> None:
        if not self.query_id or any(c.isspace() for c in self.query_id):
            raise IntegrityError(
                f"query_id must be a non-empty token without whitespace: {self.query_id!r}"
            )


@dataclass(frozen=True)
class CorpusShard:
    """An ordered, immutable slice of the corpus assigned to one mapper."""

    shard_index: int
    records: tuple[Document, ...]


def escape_field(field: str) -> str:
    return field.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def unescape_field(field: str) -> str:
    if "\\" not in field:
        return field
    out: list[str] = []
    i = 0
    while i < len(field):
        c = field[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        if i + 1 >= len(field):
            raise ValueError("dangling backslash at end of field")
        nxt = field[i + 1]
        if nxt == "t":
            out.append("\t")
        elif nxt == "n":
            out.append("\n")
        elif nxt == "\\":
            out.append("\\")
        else:
            raise ValueError(f"unknown escape sequence \\{nxt}")
        i += 2
    return "".join(out)


def _read_text(path: str | Path) -> str:
    # Binary read keeps bare \r inside fields intact; bad UTF-8 is replaced.
    if str(path).endswith(".gz"):
        with gzip.open(path, "rb") as fh:
            raw = fh.read()
    else:
        raw = Path(path).read_bytes()
    return raw.decode("utf-8", errors="replace")


def _write_text(text: str, path: str | Path) -> None:
    data = text.encode("utf-8")
    if str(path).endswith(".gz"):
        # Fixed mtime so identical corpora compress to identical bytes.
        with gzip.GzipFile(path, "wb", mtime=0) as fh:
            fh.write(data)
    else:
        Path(path).write_bytes(data)


def _non_empty_lines(text: str) -> Iterable[tuple[int, str]]:
    pieces = text.split("\n")
    if pieces and pieces[-1] == "":
        pieces.pop()
    return enumerate(pieces, start=1)


def parse_corpus(text: str, source: str = "corpus") -> list[Document]:
    """Parse corpus-format text into documents, enforcing doc_id uniqueness."""
    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, line in _non_empty_lines(text):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(
                f"{source}: line {lineno}: expected 3 tab-separated fields, got {len(parts)}"
            )
        try:
            fields = [unescape_field(p) for p in parts]
        except ValueError as exc:
            raise ParseError(f"{source}: line {lineno}: {exc}") from None
        try:
            doc = Document(fields[0], fields[1], fields[2])
        except IntegrityError as exc:
            raise IntegrityError(f"{source}: line {lineno}: {exc}") from None
        if doc.doc_id in seen:
            raise IntegrityError(
                f"{source}: line {lineno}: duplicate doc_id {doc.doc_id!r}"
            )
        seen.add(doc.doc_id)
        docs.append(doc)
    return docs


def shard_documents(docs: Sequence[Document], shard_count: int) -> list[CorpusShard]:
    """Round-robin partition: record i goes to shard i mod shard_count."""
    if shard_count < 1:
        raise ConfigurationError(f"shard_count must be >= 1, got {shard_count}")
    buckets: list[list[Document]] = [[] for _ in range(shard_count)]
    for i, doc in enumerate(docs):
        buckets[i % shard_count].append(doc)
    return [CorpusShard(i, tuple(b)) for i, b in enumerate(buckets)]


def merge_shards(shards: Sequence[CorpusShard]) -> list[Document]:
    """Interleave round-robin shards back into original corpus order."""
    out: list[Document] = []
    depth = 0
    while True:
        added = False
        for shard in shards:
            if depth < len(shard.records):
                out.append(shard.records[depth])
                added = True
        if not added:
            return out
        depth += 1


def read_corpus(path: str | Path, shard_count: int) -> list[CorpusShard]:
    return shard_documents(parse_corpus(_read_text(path), source=str(path)), shard_count)


def corpus_to_text(docs: Iterable[Document]) -> str:
    lines = []
    seen: set[str] = set()
    for doc in docs:
        if doc.doc_id in seen:
            raise IntegrityError(f"duplicate doc_id {doc.doc_id!r} in corpus output")
        seen.add(doc.doc_id)
        lines.append(
            "\t".join((escape_field(doc.doc_id), escape_field(doc.url), escape_field(doc.text)))
        )
    return "".join(line + "\n" for line in lines)


def write_corpus(docs: Iterable[Document], path: str | Path) -> None:
    _write_text(corpus_to_text(docs), path)


def read_queries(path: str | Path) -> list[Query]:
    queries: list[Query] = []
    seen: set[str] = set()
    source = str(path)
    for lineno, line in _non_empty_lines(_read_text(path)):
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(
                f"{source}: line {lineno}: expected 2 tab-separated fields, got {len(parts)}"
            )
        try:
            query = Query(parts[0], parts[1])
        except IntegrityError as exc:
            raise IntegrityError(f"{source}: line {lineno}: {exc}") from None
        if query.query_id in seen:
            raise IntegrityError(
                f"{source}: line {lineno}: duplicate query_id {query.query_id!r}"
            )
        seen.add(query.query_id)
        queries.append(query)
    return queries


_SYNTH_MIN_LEN = 10
_SYNTH_SPREAD = 15


def _synthetic_doc_id(i: int) -> str:
    return f"d{i:06d}"


def _synthetic_url(i: int) -> str:
    return f"http://docs.example/{_synthetic_doc_id(i)}"


def generate_synthetic(
    doc_count: int,
    vocab_size: int,
    seed: int,
    link_fraction: float = 0.25,
) -> list[Document]:
    """Deterministic synthetic web corpus.

    Term frequencies follow a rank-inverse (Zipf) distribution over the
    vocabulary. Document lengths are log-uniform between 10 and 150 tokens;
    the first two documents are pinned to the extremes so the shortest and
    longest always differ by at least 10x. A ``link_fraction`` share of
    documents (beyond the two pinned ones) embed HTML anchors that point at
    other generated documents' URLs, some with nested markup in the anchor
    text.
    """
    if doc_count < 1:
        raise ConfigurationError(f"doc_count must be >= 1, got {doc_count}")
    if vocab_size < 2:
        raise ConfigurationError(f"vocab_size must be >= 2, got {vocab_size}")
    if not 0.0 <= link_fraction <= 1.0:
        raise ConfigurationError(f"link_fraction must be in [0, 1], got {link_fraction}")

    rng = random.Random(seed)
    vocab = [f"w{k:04d}" for k in range(vocab_size)]
    cum_weights = list(accumulate(1.0 / rank for rank in range(1, vocab_size + 1)))

    def words(n: int) -> list[str]:
        return rng.choices(vocab, cum_weights=cum_weights, k=n)

    docs: list[Document] = []
    for i in range(doc_count):
        if i == 0:
            length = _SYNTH_MIN_LEN
        elif i == 1:
            length = _SYNTH_MIN_LEN * _SYNTH_SPREAD
        else:
            length = int(round(_SYNTH_MIN_LEN * _SYNTH_SPREAD ** rng.random()))
        tokens = words(length)

        # Docs 0 and 1 stay plain text so the pinned token counts hold exactly.
        if i >= 2:
            if length >= 3 and rng.random() < 0.15:
                p = rng.randrange(length)
                tokens[p] = f"<b>{tokens[p]}</b>"
            if doc_count > 1 and rng.random() < link_fraction:
                for _ in range(rng.randint(1, 3)):
                    target = rng.randrange(doc_count - 1)
                    if target >= i:
                        target += 1
                    anchor_words = words(rng.randint(1, 4))
                    if len(anchor_words) >= 2 and rng.random() < 0.3:
                        anchor_words[-1] = f"<i>{anchor_words[-1]}</i>"
                    anchor = f'<a href="{_synthetic_url(target)}">{" ".join(anchor_words)}</a>'
                    tokens.insert(rng.randrange(len(tokens) + 1), anchor)

        docs.append(Document(_synthetic_doc_id(i), _synthetic_url(i), " ".join(tokens)))
    return docs

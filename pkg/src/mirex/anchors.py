"""Anchor-text extraction: harvest (target URL, anchor text) pairs from
document HTML, group them by target document, and emit an anchor-text corpus
in the standard corpus format.

Parsing is a single-pass streaming tag scanner, not an HTML tree: an anchor
captures its href and the visible text up to the matching close tag, nested
markup is stripped to text, and an unclosed anchor ends at the next
anchor-open or end of input. Unparseable regions are skipped, never fatal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from string import ascii_letters, digits
from typing import Sequence
from urllib.parse import urljoin, urlsplit, urlunsplit

from .corpus import CorpusShard, Document
from .engine import Job, run_job
from .errors import IntegrityError

__all__ = [
    "AnchorPair",
    "AnchorDocument",
    "extract_anchors",
    "normalize_url",
    "strip_tags",
    "build_anchor_corpus",
]

DEFAULT_ANCHOR_TOKEN_CAP = 512

_HREF_RE = re.compile(r"""href\s*=\s*("([^"]*)"|'([^']*)'|([^\s>]+))""", re.IGNORECASE)
_PCT_RE = re.compile(r"%([0-9A-Fa-f]{2})")
_WS_RE = re.compile(r"\s+")
_UNRESERVED = set(ascii_letters + digits + "-._~")
_DEFAULT_PORTS = {"http": 80, "https": 443}


@dataclass(frozen=True)
class AnchorPair:
    target_url: str
    anchor_text: str
    source_doc_id: str
    ordinal: int


@dataclass(frozen=True)
class AnchorDocument:
    doc_id: str
    text: str


def strip_tags(text: str) -> str:
    """Drop <...> tag spans, replacing each with a space. A '<' never closed
    swallows the rest of the input."""
    out = []
    i = 0
    n = len(text)
    while i < n:
        lt = text.find("<", i)
        if lt == -1:
            out.append(text[i:])
            break
        out.append(text[i:lt])
        gt = text.find(">", lt + 1)
        if gt == -1:
            break
        out.append(" ")
        i = gt + 1
    return "".join(out)


def _decode_unreserved(component: str) -> str:
    def repl(match: re.Match) -> str:
        char = chr(int(match.group(1), 16))
        return char if char in _UNRESERVED else match.group(0)

    return _PCT_RE.sub(repl, component)


def normalize_url(raw: str, base: str | None = None) -> str | None:
    """Canonicalize a URL for use as a join key, or None when unusable.

    Lowercases scheme and host, strips the fragment, drops default ports,
    percent-decodes unreserved characters, and resolves relative references
    against ``base``. Non-http(s) schemes and unresolvable relatives yield
    None, which callers treat as "skip".
    """
    raw = raw.strip()
    if not raw:
        return None
    try:
        resolved = urljoin(base, raw) if base else raw
        parts = urlsplit(resolved)
        scheme = parts.scheme.lower()
        if scheme not in ("http", "https"):
            return None
        host = parts.hostname
        if not host:
            return None
        port = parts.port
    except ValueError:
        return None
    netloc = host
    if parts.username:
        auth = parts.username + (f":{parts.password}" if parts.password else "")
        netloc = f"{auth}@{netloc}"
    if port is not None and port != _DEFAULT_PORTS[scheme]:
        netloc = f"{netloc}:{port}"
    path = _decode_unreserved(parts.path)
    query = _decode_unreserved(parts.query)
    return urlunsplit((scheme, netloc, path, query, ""))


def _is_anchor_open(text: str, pos: int) -> bool:
    # "<a" must be followed by whitespace, '>', or '/' so "<abbr>" is not one.
    if pos + 2 >= len(text):
        return pos + 2 == len(text)
    return text[pos + 2] in " \t\r\n/>"


def _find_anchor_open(lower: str, start: int) -> int:
    pos = start
    while True:
        pos = lower.find("<a", pos)
        if pos == -1 or _is_anchor_open(lower, pos):
            return pos
        pos += 2


def _find_anchor_close(lower: str, start: int) -> int:
    # "</a" must be followed by '>' or whitespace so "</abbr>" is not a close.
    pos = start
    while True:
        pos = lower.find("</a", pos)
        if pos == -1:
            return -1
        after = pos + 3
        if after >= len(lower) or lower[after] in " \t\r\n>":
            return pos
        pos += 3


def _cap_tokens(text: str, cap: int) -> str:
    pieces = text.split(" ")
    if len(pieces) <= cap:
        return text
    return " ".join(pieces[:cap])


def extract_anchors(
    doc: Document, max_anchor_tokens: int = DEFAULT_ANCHOR_TOKEN_CAP
) -> list[AnchorPair]:
    """Scan a document's (possibly malformed) HTML for anchor elements.

    Relative hrefs resolve against the document URL; hrefs that do not
    normalize (bad scheme, unresolvable relative) produce no pair. Anchor
    text is whitespace-collapsed and truncated to ``max_anchor_tokens``.
    """
    text = doc.text
    lower = text.lower()
    base = doc.url or None
    pairs: list[AnchorPair] = []
    ordinal = 0
    pos = 0
    while True:
        open_at = _find_anchor_open(lower, pos)
        if open_at == -1:
            break
        tag_end = text.find(">", open_at + 2)
        if tag_end == -1:
            break
        href_match = _HREF_RE.search(text[open_at + 2 : tag_end])

        close_at = _find_anchor_close(lower, tag_end + 1)
        next_open = _find_anchor_open(lower, tag_end + 1)
        if close_at != -1 and (next_open == -1 or close_at < next_open):
            content = text[tag_end + 1 : close_at]
            close_gt = text.find(">", close_at)
            pos = close_gt + 1 if close_gt != -1 else len(text)
        elif next_open != -1:
            content = text[tag_end + 1 : next_open]
            pos = next_open
        else:
            content = text[tag_end + 1 :]
            pos = len(text)

        if href_match is None:
            continue
        href = href_match.group(2) or href_match.group(3) or href_match.group(4) or ""
        target = normalize_url(href, base)
        if target is None:
            continue
        visible = _WS_RE.sub(" ", strip_tags(content)).strip()
        pairs.append(
            AnchorPair(target, _cap_tokens(visible, max_anchor_tokens), doc.doc_id, ordinal)
        )
        ordinal += 1
    return pairs


def _build_url_table(shards: Sequence[CorpusShard]) -> dict[str, str]:
    table: dict[str, str] = {}
    for shard in shards:
        for doc in shard.records:
            if not doc.url:
                continue
            normalized = normalize_url(doc.url)
            if normalized is None:
                continue
            other = table.get(normalized)
            if other is not None and other != doc.doc_id:
                raise IntegrityError(
                    f"URL {normalized!r} maps to both doc {other!r} and doc {doc.doc_id!r}"
                )
            table[normalized] = doc.doc_id
    return table


def build_anchor_corpus(
    shards: Sequence[CorpusShard],
    worker_count: int = 1,
    max_anchor_tokens: int = DEFAULT_ANCHOR_TOKEN_CAP,
) -> tuple[list[AnchorDocument], float]:
    """Run the anchor-extraction job and return (anchor docs, coverage ratio).

    Anchor texts for one target are concatenated space-separated in
    (source doc_id, ordinal) order. Self-links and targets outside the corpus
    are dropped; coverage is the fraction of corpus documents that received
    any anchor text.
    """
    table = _build_url_table(shards)
    doc_total = sum(len(shard.records) for shard in shards)

    def map_fn(doc):
        pairs = []
        for anchor in extract_anchors(doc, max_anchor_tokens):
            if not anchor.anchor_text:
                continue
            target_doc = table.get(anchor.target_url)
            if target_doc is None or target_doc == doc.doc_id:
                continue
            pairs.append((target_doc, (doc.doc_id, anchor.ordinal, anchor.anchor_text)))
        return pairs

    def reduce_fn(key, values):
        return [(key, " ".join(v[2] for v in values))]

    job = Job(name="anchors", map=map_fn, reduce=reduce_fn)
    records, _ = run_job(job, shards, worker_count)
    anchor_docs = [AnchorDocument(doc_id, text) for doc_id, text in records]
    coverage = len(anchor_docs) / doc_total if doc_total else 0.0
    return anchor_docs, coverage

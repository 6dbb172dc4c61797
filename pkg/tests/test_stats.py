from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirex.corpus import generate_synthetic, shard_documents
from mirex.errors import FormatError
from mirex.textstats import CollectionStats, compute_stats, load_stats, save_stats, tokenize

from conftest import shards_from


def test_tokenize_basic():
    assert tokenize("Hello, World!") == ["hello", "world"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_unicode_runs():
    assert tokenize("état-3 ÉTAT") == ["état", "3", "état"]


def test_tokenize_no_underscore_joining():
    assert tokenize("a_b") == ["a", "b"]


@given(st.text(alphabet="ab1é .,-", max_size=20), st.text(alphabet="ab1é .,-", max_size=20))
@settings(max_examples=80, deadline=None)
def test_tokenize_concatenation(a, b):
    assert tokenize(a + " " + b) == tokenize(a) + tokenize(b)


def test_compute_stats_small():
    stats = compute_stats(shards_from({"d1": "a a b", "d2": "b"}))
    assert stats.total_tokens == 4
    assert stats.doc_count == 2
    assert stats.cf == {"a": 2, "b": 2}
    assert stats.doc_len == {"d1": 3, "d2": 1}


def test_compute_stats_empty_corpus():
    stats = compute_stats(shard_documents([], 3))
    assert stats == CollectionStats()


def test_compute_stats_counts_empty_documents():
    stats = compute_stats(shards_from({"d1": "", "d2": "a"}))
    assert stats.doc_count == 2
    assert stats.doc_len == {"d1": 0, "d2": 1}


def brute_count(docs):
    cf = Counter()
    doc_len = {}
    for doc in docs:
        tokens = tokenize(doc.text)
        cf.update(tokens)
        doc_len[doc.doc_id] = len(tokens)
    return dict(cf), doc_len


def test_compute_stats_matches_single_pass_oracle():
    docs = generate_synthetic(1000, 400, seed=11, link_fraction=0.4)
    stats = compute_stats(shard_documents(docs, 9), worker_count=4)
    cf, doc_len = brute_count(docs)
    assert stats.cf == cf
    assert stats.doc_len == doc_len
    assert stats.total_tokens == sum(cf.values())
    assert stats.doc_count == 1000


def test_compute_stats_invariant_under_parallelism():
    docs = generate_synthetic(300, 120, seed=4)
    reference = compute_stats(shard_documents(docs, 1), 1)
    for shard_count, workers in ((1, 4), (3, 2), (16, 8)):
        stats = compute_stats(shard_documents(docs, shard_count), workers)
        assert stats == reference


def test_conservation_invariant():
    docs = generate_synthetic(200, 80, seed=9)
    stats = compute_stats(shard_documents(docs, 4), 2)
    assert sum(stats.cf.values()) == stats.total_tokens
    assert sum(stats.doc_len.values()) == stats.total_tokens


def test_save_load_round_trip(tmp_path):
    stats = compute_stats(shards_from({"d1": "a a b", "d2": "b c"}, 2))
    path = tmp_path / "s.tsv"
    save_stats(stats, path)
    assert load_stats(path) == stats


def test_save_load_empty_stats(tmp_path):
    path = tmp_path / "s.tsv"
    save_stats(CollectionStats(), path)
    assert load_stats(path) == CollectionStats()


def test_load_truncated_file_is_format_error(tmp_path):
    stats = compute_stats(shards_from({"d1": "a a b", "d2": "b c"}))
    path = tmp_path / "s.tsv"
    save_stats(stats, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n", encoding="utf-8")
    with pytest.raises(FormatError):
        load_stats(path)


def test_load_wrong_magic(tmp_path):
    path = tmp_path / "s.tsv"
    path.write_text("not.stats\t1\t0\t0\n", encoding="utf-8")
    with pytest.raises(FormatError, match="header"):
        load_stats(path)


def test_load_wrong_version(tmp_path):
    path = tmp_path / "s.tsv"
    path.write_text("mirex.stats\t9\t0\t0\n", encoding="utf-8")
    with pytest.raises(FormatError, match="version"):
        load_stats(path)


def test_strip_html_changes_representation():
    shards = shards_from({"d1": '<a href="http://x/">hello</a> plain'})
    raw = compute_stats(shards)
    stripped = compute_stats(shards, strip_html=True)
    assert "href" in raw.cf
    assert "href" not in stripped.cf
    assert stripped.cf == {"hello": 1, "plain": 1}

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirex.corpus import (
    Document,
    Query,
    corpus_to_text,
    generate_synthetic,
    merge_shards,
    parse_corpus,
    read_corpus,
    read_queries,
    shard_documents,
    write_corpus,
)
from mirex.errors import ConfigurationError, IntegrityError, ParseError
from mirex.textstats import tokenize


def test_round_robin_sharding(tmp_path):
    docs = [Document(f"d{i}", "", f"text {i}") for i in range(4)]
    path = tmp_path / "c.tsv"
    write_corpus(docs, path)
    shards = read_corpus(path, 2)
    assert [d.doc_id for d in shards[0].records] == ["d0", "d2"]
    assert [d.doc_id for d in shards[1].records] == ["d1", "d3"]


def test_parse_simple_line():
    docs = parse_corpus("d1\thttp://a/\thello world\n")
    assert docs == [Document("d1", "http://a/", "hello world")]


def test_duplicate_doc_id_is_integrity_error():
    text = "d1\t\ta\nd1\t\tb\n"
    with pytest.raises(IntegrityError, match="d1"):
        parse_corpus(text)


def test_escaping_tab_in_text():
    line = corpus_to_text([Document("d1", "", "a\tb")])
    assert line == "d1\t\ta\\tb\n"
    assert parse_corpus(line) == [Document("d1", "", "a\tb")]


def test_empty_corpus_round_trip(tmp_path):
    path = tmp_path / "empty.tsv"
    write_corpus([], path)
    assert path.read_bytes() == b""
    assert read_corpus(path, 3) == shard_documents([], 3)


def test_malformed_line_names_line_number():
    with pytest.raises(ParseError, match="line 2"):
        parse_corpus("d1\t\tok\nd2\tonly-two-fields\n")


def test_unknown_escape_rejected():
    with pytest.raises(ParseError, match="line 1"):
        parse_corpus("d1\t\tbad\\q\n")


def test_seeded_random_docs_round_trip(tmp_path):
    rng = random.Random(41)
    alphabet = "ab\t\n\\é →).%"
    docs = []
    for i in range(1000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 30)))
        url = "" if rng.random() < 0.3 else f"http://x/{i}"
        docs.append(Document(f"d{i}", url, text))
    path = tmp_path / "r.tsv"
    write_corpus(docs, path)
    assert merge_shards(read_corpus(path, 7)) == docs


@given(
    st.lists(
        st.tuples(
            st.text(alphabet="abc\t\n\\é ", max_size=12),
            st.text(alphabet="xy\t\n\\", max_size=6),
        ),
        max_size=30,
    )
)
@settings(max_examples=60, deadline=None)
def test_round_trip_property(fields):
    docs = [Document(f"d{i}", url, text) for i, (text, url) in enumerate(fields)]
    assert parse_corpus(corpus_to_text(docs)) == docs


def test_gzip_round_trip(tmp_path):
    docs = [Document("d1", "http://a/", "hello\nthere"), Document("d2", "", "")]
    path = tmp_path / "c.tsv.gz"
    write_corpus(docs, path)
    assert path.read_bytes()[:2] == b"\x1f\x8b"
    assert merge_shards(read_corpus(path, 2)) == docs


def test_sharding_partition_property():
    docs = [Document(f"d{i:03d}", "", str(i)) for i in range(23)]
    for n in (1, 2, 5, 23, 40):
        shards = shard_documents(docs, n)
        assert len(shards) == n
        assert sum(len(s.records) for s in shards) == len(docs)
        assert merge_shards(shards) == docs


def test_shard_count_validation():
    with pytest.raises(ConfigurationError):
        shard_documents([], 0)


def test_document_id_validation():
    with pytest.raises(IntegrityError):
        Document("has space", "", "")
    with pytest.raises(IntegrityError):
        Document("", "", "")
    with pytest.raises(IntegrityError):
        Document("tab\tid", "", "")


def test_read_queries(tmp_path):
    path = tmp_path / "q.tsv"
    path.write_text("wt09-1\tobama family tree\nwt09-2\tsecond one\n", encoding="utf-8")
    assert read_queries(path) == [
        Query("wt09-1", "obama family tree"),
        Query("wt09-2", "second one"),
    ]


def test_read_queries_empty_file(tmp_path):
    path = tmp_path / "q.tsv"
    path.write_text("", encoding="utf-8")
    assert read_queries(path) == []


def test_read_queries_duplicate_ids(tmp_path):
    path = tmp_path / "q.tsv"
    path.write_text("q1\ta\nq1\tb\n", encoding="utf-8")
    with pytest.raises(IntegrityError, match="q1"):
        read_queries(path)


def test_read_queries_field_count(tmp_path):
    path = tmp_path / "q.tsv"
    path.write_text("q1\ta\tb\n", encoding="utf-8")
    with pytest.raises(ParseError, match="line 1"):
        read_queries(path)


def test_generator_deterministic(tmp_path):
    a = generate_synthetic(10, 50, seed=7)
    b = generate_synthetic(10, 50, seed=7)
    pa, pb = tmp_path / "a.tsv", tmp_path / "b.tsv"
    write_corpus(a, pa)
    write_corpus(b, pb)
    assert pa.read_bytes() == pb.read_bytes()
    assert generate_synthetic(10, 50, seed=8) != a


def test_generator_unique_ids():
    docs = generate_synthetic(1000, 500, seed=1)
    assert len({d.doc_id for d in docs}) == 1000


def test_generator_length_spread():
    docs = generate_synthetic(1000, 500, seed=1)
    lengths = [len(tokenize(d.text)) for d in docs]
    assert max(lengths) / min(lengths) >= 10


def test_generator_length_spread_tiny_corpus():
    lengths = [len(tokenize(d.text)) for d in generate_synthetic(2, 10, seed=3)]
    assert max(lengths) / min(lengths) >= 10


def test_generator_embeds_links():
    docs = generate_synthetic(200, 100, seed=2, link_fraction=0.9)
    urls = {d.url for d in docs}
    linked = [d for d in docs if '<a href="' in d.text]
    assert len(linked) > 100
    assert any(f'href="{u}"' in d.text for d in linked for u in urls)


def test_generator_precondition_errors():
    with pytest.raises(ConfigurationError):
        generate_synthetic(0, 10, seed=1)
    with pytest.raises(ConfigurationError):
        generate_synthetic(10, 1, seed=1)

import dataclasses
from collections import Counter

import pytest

from mirex.engine import Job, run_job, verify_combiner
from mirex.errors import ConfigurationError, JobError
from mirex.textstats import tokenize

from conftest import shards_from


def word_count_job(combine_limit=8192):
    def map_fn(doc):
        return [(t, 1) for t in tokenize(doc.text)]

    def sum_values(key, values):
        return [sum(values)]

    def reduce_fn(key, values):
        return [(key, sum(values))]

    return Job(
        name="wordcount",
        map=map_fn,
        reduce=reduce_fn,
        combine=sum_values,
        combine_limit=combine_limit,
    )


def test_word_count():
    shards = shards_from({"d1": "a b", "d2": "b"})
    records, _ = run_job(word_count_job(), shards, 1)
    assert records == [("a", 1), ("b", 2)]


def test_identical_output_across_worker_counts():
    shards = shards_from({f"d{i}": f"a b{i % 3} c" for i in range(40)}, shard_count=8)
    baseline, _ = run_job(word_count_job(), shards, 1)
    for workers in (2, 4, 8, 13):
        records, _ = run_job(word_count_job(), shards, workers)
        assert records == baseline


def test_identical_output_across_shard_permutations():
    docs = {f"d{i}": f"t{i % 5} common x{i % 2}" for i in range(30)}
    reference, _ = run_job(word_count_job(), shards_from(docs, 1), 1)
    shards = shards_from(docs, 6)
    permuted = [shards[i] for i in (3, 0, 5, 1, 4, 2)]
    records, _ = run_job(word_count_job(), permuted, 4)
    assert records == reference


def test_shuffle_stats_counts():
    shards = shards_from({"d1": "a a a b", "d2": "a b b"}, shard_count=2)
    records, stats = run_job(word_count_job(), shards, 2)
    assert records == [("a", 4), ("b", 3)]
    assert stats.records_emitted_by_maps == 7
    # One combined record per key per worker.
    assert stats.records_after_combine == 4
    assert stats.records_after_combine <= stats.records_emitted_by_maps
    assert stats.per_key_after_combine == Counter({"a": 2, "b": 2})


def test_combine_disabled_counts_raw_records():
    shards = shards_from({"d1": "a a a b", "d2": "a b b"}, shard_count=2)
    job = dataclasses.replace(word_count_job(), combine=None)
    _, stats = run_job(job, shards, 2)
    assert stats.records_after_combine == stats.records_emitted_by_maps == 7


def test_small_combine_limit_same_output():
    docs = {f"d{i}": "a " * 20 for i in range(10)}
    expected, _ = run_job(word_count_job(), shards_from(docs, 1), 1)
    records, stats = run_job(word_count_job(combine_limit=3), shards_from(docs, 4), 4)
    assert records == expected
    assert stats.records_after_combine <= 4


def test_no_key_loss():
    docs = {f"d{i}": f"k{i} shared" for i in range(25)}
    shards = shards_from(docs, 5)
    seen_in_reduce = []

    def reduce_fn(key, values):
        seen_in_reduce.append(key)
        return [(key, len(values))]

    job = Job(name="keys", map=lambda d: [(t, 1) for t in tokenize(d.text)], reduce=reduce_fn)
    records, _ = run_job(job, shards, 3)
    emitted_keys = {t for text in docs.values() for t in tokenize(text)}
    assert sorted(seen_in_reduce) == sorted(emitted_keys)
    assert len(seen_in_reduce) == len(set(seen_in_reduce))  # once per key
    assert [k for k, _ in records] == sorted(emitted_keys)


def test_map_error_names_doc_and_shard():
    def bad_map(doc):
        if doc.doc_id == "d3":
            raise ValueError("boom")
        return []

    shards = shards_from({f"d{i}": "x" for i in range(6)}, shard_count=2)
    job = Job(name="fails", map=bad_map, reduce=lambda k, v: [])
    with pytest.raises(JobError, match=r"'d3'.*shard 1"):
        run_job(job, shards, 2)


def test_reduce_error_names_key():
    def bad_reduce(key, values):
        raise RuntimeError("nope")

    job = Job(name="badreduce", map=lambda d: [("k", 1)], reduce=bad_reduce)
    with pytest.raises(JobError, match="'k'"):
        run_job(job, shards_from({"d1": "x"}), 1)


def test_worker_count_validation():
    with pytest.raises(ConfigurationError):
        run_job(word_count_job(), shards_from({"d1": "x"}), 0)


def test_verify_combiner_true_for_sum():
    shards = shards_from({f"d{i}": "a b a" for i in range(12)}, shard_count=4)
    assert verify_combiner(word_count_job(), shards, worker_count=3) is True


def test_verify_combiner_catches_lossy_combiner():
    def dropping_combine(key, values):
        return [sum(values[:-1])] if len(values) > 1 else list(values)

    job = dataclasses.replace(word_count_job(), combine=dropping_combine)
    shards = shards_from({f"d{i}": "a a a" for i in range(8)}, shard_count=4)
    assert verify_combiner(job, shards, worker_count=2) is False


def test_verify_combiner_requires_combine():
    job = dataclasses.replace(word_count_job(), combine=None)
    with pytest.raises(ConfigurationError):
        verify_combiner(job, shards_from({"d1": "x"}))


def test_values_sorted_by_job_order():
    # Reduce sees values in the job-supplied total order regardless of the
    # emission interleaving across workers.
    docs = {f"d{i:02d}": "k" for i in range(10)}
    shards = shards_from(docs, 5)

    def map_fn(doc):
        return [("k", doc.doc_id)]

    def reduce_fn(key, values):
        return [(key, tuple(values))]

    job = Job(name="order", map=map_fn, reduce=reduce_fn, value_key=lambda v: v)
    records, _ = run_job(job, shards, 5)
    assert records == [("k", tuple(sorted(docs)))]

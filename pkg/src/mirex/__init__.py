"""mirex: batch sequential-scan retrieval experiments.

One pass over a sharded document corpus evaluates an entire benchmark query
set through a map-combine-reduce executor with a bounded top-K ranked list,
alongside anchor-text extraction, an inverted-index equivalence baseline,
TREC-format evaluation, and a query-set-size scaling benchmark.
"""

from .corpus import (
    CorpusShard,
    Document,
    Query,
    generate_synthetic,
    merge_shards,
    read_corpus,
    read_queries,
    shard_documents,
    write_corpus,
)
from .engine import Job, ShuffleStats, run_job, verify_combiner
from .errors import (
    ConfigurationError,
    FormatError,
    IntegrityError,
    JobError,
    MirexError,
    ParseError,
)
from .scoring import ScoringParams, score_document, rank_order_check
from .search import RankedList, ScoredDoc, ranked_insert, sequential_search
from .textstats import CollectionStats, compute_stats, load_stats, save_stats, tokenize

__version__ = "0.1.0"

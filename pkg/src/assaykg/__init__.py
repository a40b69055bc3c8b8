"""assaykg: a knowledge-graph digital library engine for semantified bioassays.

Two digitalization workflows over one embedded triple store: manual statement
entry, and automated semantification with human-in-the-loop curation. On top
of the graph: property-aligned comparison tables, similar-assay search,
N-Triples export/import, snapshot persistence, an HTTP/JSON API and a CLI.
"""
from .compare import (
    ComparisonTable,
    SimilarityResult,
    build_comparison,
    find_similar,
    jaccard_similarity,
)
from .corpus import AnnotatedAssay, CorpusStats, compute_stats, parse_corpus, serialize_corpus, to_graph
from .curation import CurationSession, add_manual, decide, finalize, open_session
from .graph import KnowledgeGraph, Literal, Statement, normalize_label
from .ntriples import export_ntriples, import_ntriples
from .semantify import (
    LabelSpace,
    Prediction,
    StatementLabel,
    TrainConfig,
    TrainedModel,
    build_label_space,
    evaluate,
    load_model,
    predict,
    save_model,
    tokenize,
    train,
)
from .store import Store, load_snapshot, save_snapshot

__version__ = "0.1.0"

__all__ = [
    "AnnotatedAssay",
    "ComparisonTable",
    "CorpusStats",
    "CurationSession",
    "KnowledgeGraph",
    "LabelSpace",
    "Literal",
    "Prediction",
    "SimilarityResult",
    "Statement",
    "StatementLabel",
    "Store",
    "TrainConfig",
    "TrainedModel",
    "add_manual",
    "build_comparison",
    "build_label_space",
    "compute_stats",
    "decide",
    "evaluate",
    "export_ntriples",
    "finalize",
    "find_similar",
    "import_ntriples",
    "jaccard_similarity",
    "load_model",
    "load_snapshot",
    "normalize_label",
    "open_session",
    "parse_corpus",
    "predict",
    "save_model",
    "save_snapshot",
    "serialize_corpus",
    "to_graph",
    "tokenize",
    "train",
]

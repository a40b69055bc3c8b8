from __future__ import annotations

from pathlib import Path

import pytest

from assaykg.corpus import parse_corpus
from assaykg.graph import KnowledgeGraph
from assaykg.semantify import (
    LabelSpace,
    ModelMetadata,
    StatementLabel,
    TrainConfig,
    TrainedModel,
    build_label_space,
    train,
)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixture_corpus_path() -> Path:
    return FIXTURES / "corpus_3assays.jsonl"


@pytest.fixture
def train_corpus_path() -> Path:
    return FIXTURES / "train_corpus6.jsonl"


@pytest.fixture
def fixture_corpus(fixture_corpus_path):
    assays, warnings = parse_corpus(fixture_corpus_path)
    assert not warnings
    return assays


@pytest.fixture
def train_corpus(train_corpus_path):
    assays, warnings = parse_corpus(train_corpus_path)
    assert not warnings
    return assays


@pytest.fixture
def fixture_model(train_corpus) -> TrainedModel:
    """Model trained on the 6-assay synthetic corpus; all thresholds 0.30."""
    space = build_label_space(train_corpus, min_frequency=1)
    return train(train_corpus, space, TrainConfig(seed=7, calibration_split=0.0))


def make_handmade_model(
    marker_by_label: dict[str, str],
    thresholds: float | dict[str, float] = 0.6,
    omitted: tuple[str, ...] = (),
) -> TrainedModel:
    """A model built by hand: one unit-centroid marker token per label.

    With uniform idf 1.0, a text containing k marked tokens scores
    (1 + 1/sqrt(n_features)) / 2 for each matching label and 0.5 otherwise.
    """
    labels = tuple(StatementLabel.from_key(key) for key in marker_by_label)
    vocabulary = tuple(marker_by_label.values())
    index = {token: i for i, token in enumerate(vocabulary)}
    centroids = {key: {index[token]: 1.0} for key, token in marker_by_label.items()}
    if isinstance(thresholds, dict):
        threshold_map = dict(thresholds)
    else:
        threshold_map = {key: thresholds for key in marker_by_label}
    return TrainedModel(
        label_space=LabelSpace(labels=labels, omitted_properties=frozenset(omitted)),
        vocabulary=vocabulary,
        document_frequency=tuple(1 for _ in vocabulary),
        idf=tuple(1.0 for _ in vocabulary),
        centroids=centroids,
        thresholds=threshold_map,
        metadata=ModelMetadata(
            corpus_size=0,
            training_size=0,
            calibration_size=0,
            seed=0,
            calibration_split=0.0,
            timestamp="1970-01-01T00:00:00+00:00",
        ),
    )


def seeded_graph() -> tuple[KnowledgeGraph, list[str]]:
    """Three contributions with overlapping statement sets, for compare tests."""
    graph = KnowledgeGraph()
    contributions = []
    specs = [
        [("has assay format", "cell-based format"), ("has assay method", "reporter gene"),
         ("has detection method", "luminescence")],
        [("has assay format", "biochemical format"), ("has assay method", "reporter gene")],
        [("has assay format", "tissue-based format"), ("has endpoint", "percent inhibition")],
    ]
    for n, statements in enumerate(specs, start=1):
        paper = graph.create_paper(f"Assay paper {n}")
        contribution = graph.create_contribution(paper, label=f"assay-{n}")
        for prop, value in statements:
            graph.add_statement(contribution, predicate_label=prop, object_label=value)
        contributions.append(contribution)
    return graph, contributions

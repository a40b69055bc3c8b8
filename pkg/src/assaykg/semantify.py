"""Automated semantification: multi-label classification from assay text.

A "label" is one predictable statement, a normalized (property, value) pair.
The shipped scoring backbone is TF-IDF with one L2-normalized centroid per
label (Rocchio-style): deterministic, dependency-free, and swappable for a
heavier encoder behind the same train/predict surface.

Scoring math, fixed for reproducibility:

    idf(t)   = ln((N + 1) / (df(t) + 1)) + 1      over training texts
    doc(t)   = count(t) * idf(t), L2-normalized
    centroid = L2-normalized sum of a label's positive document vectors
    score    = (1 + cos(text, centroid)) / 2      in [0, 1]

Per-label decision thresholds are calibrated on a held-out fraction of the
corpus to maximize that label's F1; labels with fewer than 3 calibration
positives fall back to the global default threshold 0.30.
"""
from __future__ import annotations

import hashlib
import json
import math
import random
import re
import warnings as _warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .corpus import AnnotatedAssay, LABEL_KEY_SEPARATOR
from .errors import (
    DegenerateLabelWarning,
    EmptyCorpus,
    EmptyText,
    InvalidLabel,
    VersionMismatch,
)
from .graph import normalize_label

MODEL_FORMAT_VERSION = 1

DEFAULT_OMITTED_PROPERTIES = (
    "has title",
    "pubchem aid",
    "deposit date",
    "has incubation time value",
    "has concentration unit",
)

DEFAULT_THRESHOLD = 0.30
MIN_CALIBRATION_POSITIVES = 3

# Orthogonal vectors map to (1 + 0) / 2; no calibrated threshold can sit below
# this floor for a nonnegative backbone.
_SCORE_FLOOR = 0.5

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased alphanumeric runs of length > 1, then adjacent bigrams."""
    words = [w for w in _TOKEN_RE.findall(text.lower()) if len(w) > 1]
    return words + [f"{a}_{b}" for a, b in zip(words, words[1:])]


@dataclass(frozen=True)
class StatementLabel:
    """One predictable statement: a normalized (property, value) pair."""

    property: str
    value: str

    def __post_init__(self):
        for part in (self.property, self.value):
            if not part or normalize_label(part) != part:
                raise InvalidLabel(f"label part not normalized or empty: {part!r}")
            if LABEL_KEY_SEPARATOR in part:
                raise InvalidLabel(f"label part contains separator: {part!r}")

    @property
    def key(self) -> str:
        return f"{self.property}{LABEL_KEY_SEPARATOR}{self.value}"

    @classmethod
    def from_parts(cls, prop: str, value: str) -> "StatementLabel":
        return cls(normalize_label(prop), normalize_label(value))

    @classmethod
    def from_key(cls, key: str) -> "StatementLabel":
        prop, sep, value = key.partition(LABEL_KEY_SEPARATOR)
        if not sep:
            raise InvalidLabel(f"not a label key: {key!r}")
        return cls(prop, value)


@dataclass(frozen=True)
class LabelSpace:
    labels: tuple[StatementLabel, ...]
    omitted_properties: frozenset[str]

    def __len__(self) -> int:
        return len(self.labels)

    def keys(self) -> tuple[str, ...]:
        return tuple(label.key for label in self.labels)


@dataclass(frozen=True)
class Prediction:
    label: StatementLabel
    score: float
    accepted_by_threshold: bool


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 0
    calibration_split: float = 0.2
    default_threshold: float = DEFAULT_THRESHOLD
    min_calibration_positives: int = MIN_CALIBRATION_POSITIVES


@dataclass(frozen=True)
class ModelMetadata:
    corpus_size: int
    training_size: int
    calibration_size: int
    seed: int
    calibration_split: float
    timestamp: str
    dropped_labels: tuple[str, ...] = ()


@dataclass(frozen=True)
class TrainedModel:
    """Immutable label space + vocabulary + per-label centroids and thresholds."""

    label_space: LabelSpace
    vocabulary: tuple[str, ...]
    document_frequency: tuple[int, ...]
    idf: tuple[float, ...]
    centroids: dict[str, dict[int, float]]
    thresholds: dict[str, float]
    metadata: ModelMetadata

    def vector_of(self, text: str) -> dict[int, float]:
        """L2-normalized TF-IDF vector of a text under this model's vocabulary."""
        index = self._vocabulary_index()
        counts: dict[int, int] = {}
        for token in tokenize(text):
            i = index.get(token)
            if i is not None:
                counts[i] = counts.get(i, 0) + 1
        vec = {i: c * self.idf[i] for i, c in counts.items()}
        return _l2_normalize(vec)

    def _vocabulary_index(self) -> dict[str, int]:
        cached = getattr(self, "_index_cache", None)
        if cached is None:
            cached = {t: i for i, t in enumerate(self.vocabulary)}
            object.__setattr__(self, "_index_cache", cached)
        return cached


def _l2_normalize(vec: dict[int, float]) -> dict[int, float]:
    norm = math.sqrt(sum(w * w for w in vec.values()))
    if norm == 0.0:
        return {}
    return {i: w / norm for i, w in vec.items()}


def _dot(a: dict[int, float], b: dict[int, float]) -> float:
    if len(b) < len(a):
        a, b = b, a
    return sum(w * b[i] for i, w in a.items() if i in b)


def build_label_space(
    corpus: Sequence[AnnotatedAssay],
    omitted_properties: Iterable[str] = DEFAULT_OMITTED_PROPERTIES,
    min_frequency: int = 1,
) -> LabelSpace:
    """All (property, value) pairs seen in >= min_frequency assays, minus omitted.

    Order is stable first-seen order over the corpus.
    """
    if not corpus:
        raise EmptyCorpus("cannot build a label space from an empty corpus")
    if min_frequency < 1:
        raise ValueError("min_frequency must be >= 1")
    omitted = frozenset(normalize_label(p) for p in omitted_properties)
    first_seen: list[tuple[str, str]] = []
    counts: dict[tuple[str, str], int] = {}
    for assay in corpus:
        for pair in _ordered_keys(assay):
            if pair not in counts:
                counts[pair] = 0
                first_seen.append(pair)
        for pair in assay.statement_keys():
            counts[pair] += 1
    labels = tuple(
        StatementLabel(prop, value)
        for prop, value in first_seen
        if counts[(prop, value)] >= min_frequency and prop not in omitted
    )
    return LabelSpace(labels=labels, omitted_properties=omitted)


def _ordered_keys(assay: AnnotatedAssay) -> list[tuple[str, str]]:
    seen = set()
    ordered = []
    for stmt in assay.statements:
        key = stmt.key()
        if key not in seen:
            seen.add(key)
            ordered.append(key)
    return ordered


def train(
    corpus: Sequence[AnnotatedAssay],
    label_space: LabelSpace,
    config: TrainConfig = TrainConfig(),
) -> TrainedModel:
    """Fit centroids and calibrated thresholds; deterministic given the seed."""
    if not corpus:
        raise EmptyCorpus("cannot train on an empty corpus")
    for assay in corpus:
        if not assay.text.strip():
            raise EmptyText(f"assay {assay.id!r} has empty text")
    if not 0.0 <= config.calibration_split < 1.0:
        raise ValueError("calibration_split must be in [0, 1)")

    rng = random.Random(config.seed)
    indices = list(range(len(corpus)))
    rng.shuffle(indices)
    n_cal = int(len(corpus) * config.calibration_split)
    calibration_idx = sorted(indices[:n_cal])
    training_idx = sorted(indices[n_cal:])
    training = [corpus[i] for i in training_idx]
    calibration = [corpus[i] for i in calibration_idx]

    # vocabulary in first-seen order over the training texts
    vocabulary: list[str] = []
    index: dict[str, int] = {}
    doc_tokens: list[dict[str, int]] = []
    for assay in training:
        counts: dict[str, int] = {}
        for token in tokenize(assay.text):
            counts[token] = counts.get(token, 0) + 1
            if token not in index:
                index[token] = len(vocabulary)
                vocabulary.append(token)
        doc_tokens.append(counts)

    n_train = len(training)
    df = [0] * len(vocabulary)
    for counts in doc_tokens:
        for token in counts:
            df[index[token]] += 1
    idf = [math.log((n_train + 1) / (d + 1)) + 1.0 for d in df]

    doc_vectors = []
    for counts in doc_tokens:
        vec = {index[t]: c * idf[index[t]] for t, c in counts.items()}
        doc_vectors.append(_l2_normalize(vec))

    # per-label centroids over positive training documents
    kept: list[StatementLabel] = []
    dropped: list[str] = []
    centroids: dict[str, dict[int, float]] = {}
    training_keys = [assay.statement_keys() for assay in training]
    for label in label_space.labels:
        pair = (label.property, label.value)
        acc: dict[int, float] = {}
        positives = 0
        for vec, keys in zip(doc_vectors, training_keys):
            if pair in keys:
                positives += 1
                for i, w in vec.items():
                    acc[i] = acc.get(i, 0.0) + w
        if positives == 0 or not acc:
            dropped.append(label.key)
            _warnings.warn(
                f"label {label.key!r} has no positive training documents; dropped",
                DegenerateLabelWarning,
                stacklevel=2,
            )
            continue
        kept.append(label)
        centroids[label.key] = _l2_normalize(acc)

    model_space = LabelSpace(labels=tuple(kept), omitted_properties=label_space.omitted_properties)

    # threshold calibration
    cal_vectors = []
    if calibration:
        cal_index = {t: i for i, t in enumerate(vocabulary)}
        for assay in calibration:
            counts = {}
            for token in tokenize(assay.text):
                i = cal_index.get(token)
                if i is not None:
                    counts[i] = counts.get(i, 0) + 1
            cal_vectors.append(_l2_normalize({i: c * idf[i] for i, c in counts.items()}))
    cal_keys = [assay.statement_keys() for assay in calibration]

    thresholds: dict[str, float] = {}
    for label in model_space.labels:
        pair = (label.property, label.value)
        scores = [(_cosine_score(vec, centroids[label.key]), pair in keys)
                  for vec, keys in zip(cal_vectors, cal_keys)]
        n_pos = sum(1 for _, positive in scores if positive)
        if n_pos < config.min_calibration_positives:
            thresholds[label.key] = config.default_threshold
        else:
            thresholds[label.key] = _best_f1_threshold(scores)

    meta = ModelMetadata(
        corpus_size=len(corpus),
        training_size=n_train,
        calibration_size=len(calibration),
        seed=config.seed,
        calibration_split=config.calibration_split,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        dropped_labels=tuple(dropped),
    )
    return TrainedModel(
        label_space=model_space,
        vocabulary=tuple(vocabulary),
        document_frequency=tuple(df),
        idf=tuple(idf),
        centroids=centroids,
        thresholds=thresholds,
        metadata=meta,
    )


def _cosine_score(vec: dict[int, float], centroid: dict[int, float]) -> float:
    return (1.0 + _dot(vec, centroid)) / 2.0


def _best_f1_threshold(scores: list[tuple[float, bool]]) -> float:
    """Threshold (predict positive iff score >= t) maximizing F1 on the split.

    Candidates are the midpoints between adjacent distinct scores plus an
    accept-all point halfway between the orthogonality floor and the lowest
    observed score; ties prefer the lowest threshold (recall-leaning).
    """
    distinct = sorted({s for s, _ in scores})
    candidates = [max((_SCORE_FLOOR + distinct[0]) / 2.0, 1e-9)]
    candidates += [(a + b) / 2.0 for a, b in zip(distinct, distinct[1:])]
    best_t = candidates[0]
    best_f1 = -1.0
    for t in candidates:
        tp = sum(1 for s, positive in scores if positive and s >= t)
        fp = sum(1 for s, positive in scores if not positive and s >= t)
        fn = sum(1 for s, positive in scores if positive and s < t)
        denom = 2 * tp + fp + fn
        f1 = (2 * tp / denom) if denom else 0.0
        if f1 > best_f1:
            best_f1, best_t = f1, t
    return min(best_t, 1.0)


def predict(model: TrainedModel, text: str, top_k: int = 10) -> list[Prediction]:
    """Top-k labels by centroid score, each flagged by its calibrated threshold.

    A text that tokenizes to nothing, or shares no token with the model
    vocabulary, yields an empty list (no-signal rule).
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if not text.strip():
        raise EmptyText("cannot predict on empty text")
    vector = model.vector_of(text)
    if not vector:
        return []
    scored = []
    for order, label in enumerate(model.label_space.labels):
        score = _cosine_score(vector, model.centroids[label.key])
        scored.append((-score, order, label))
    scored.sort()
    predictions = []
    for neg_score, _, label in scored[:top_k]:
        score = -neg_score
        predictions.append(
            Prediction(label=label, score=score, accepted_by_threshold=score >= model.thresholds[label.key])
        )
    return predictions


@dataclass(frozen=True)
class AssayEvaluation:
    assay_id: str
    gold: tuple[str, ...]
    accepted: tuple[str, ...]
    true_positives: int
    false_positives: int
    false_negatives: int
    precision: float
    recall: float
    f1: float
    unmatched_accepted: tuple[str, ...]
    missed_gold: tuple[str, ...]


@dataclass(frozen=True)
class EvaluationReport:
    micro_precision: float
    micro_recall: float
    micro_f1: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_assay: tuple[AssayEvaluation, ...]


def evaluate(model: TrainedModel, gold_corpus: Sequence[AnnotatedAssay]) -> EvaluationReport:
    """Set-intersection metrics of accepted predictions against gold statements.

    Gold pairs under the model's omitted properties are filtered out before
    comparison. Precision with zero accepted predictions is defined as 0.
    Assays left with no gold labels are excluded from macro averaging; their
    "unmatched accepted" predictions stay visible for human review.
    """
    if not gold_corpus:
        raise EmptyCorpus("cannot evaluate on an empty corpus")
    per_assay: list[AssayEvaluation] = []
    pooled_tp = pooled_fp = pooled_fn = 0
    for assay in gold_corpus:
        gold = {
            LABEL_KEY_SEPARATOR.join(key)
            for key in assay.statement_keys()
            if key[0] not in model.label_space.omitted_properties
        }
        predictions = predict(model, assay.text, top_k=max(1, len(model.label_space)))
        accepted = [p.label.key for p in predictions if p.accepted_by_threshold]
        accepted_set = set(accepted)
        tp = len(accepted_set & gold)
        fp = len(accepted_set - gold)
        fn = len(gold - accepted_set)
        precision = tp / (tp + fp) if (tp + fp) else 0.0
        recall = tp / (tp + fn) if (tp + fn) else 0.0
        f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
        pooled_tp += tp
        pooled_fp += fp
        pooled_fn += fn
        per_assay.append(
            AssayEvaluation(
                assay_id=assay.id,
                gold=tuple(sorted(gold)),
                accepted=tuple(accepted),
                true_positives=tp,
                false_positives=fp,
                false_negatives=fn,
                precision=precision,
                recall=recall,
                f1=f1,
                unmatched_accepted=tuple(sorted(accepted_set - gold)),
                missed_gold=tuple(sorted(gold - accepted_set)),
            )
        )
    micro_p = pooled_tp / (pooled_tp + pooled_fp) if (pooled_tp + pooled_fp) else 0.0
    micro_r = pooled_tp / (pooled_tp + pooled_fn) if (pooled_tp + pooled_fn) else 0.0
    micro_f1 = 2 * micro_p * micro_r / (micro_p + micro_r) if (micro_p + micro_r) else 0.0
    scored = [e for e in per_assay if e.gold]
    if scored:
        macro_p = sum(e.precision for e in scored) / len(scored)
        macro_r = sum(e.recall for e in scored) / len(scored)
        macro_f1 = sum(e.f1 for e in scored) / len(scored)
    else:
        macro_p = macro_r = macro_f1 = 0.0
    return EvaluationReport(
        micro_precision=micro_p,
        micro_recall=micro_r,
        micro_f1=micro_f1,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f1,
        per_assay=tuple(per_assay),
    )


# -- model serialization ------------------------------------------------------


def model_to_bytes(model: TrainedModel) -> bytes:
    """Canonical byte form; save -> load -> save is byte-identical."""
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "labels": [label.key for label in model.label_space.labels],
        "omitted_properties": sorted(model.label_space.omitted_properties),
        "vocabulary": list(model.vocabulary),
        "document_frequency": list(model.document_frequency),
        "idf": list(model.idf),
        "centroids": {
            key: [[i, w] for i, w in sorted(vec.items())] for key, vec in model.centroids.items()
        },
        "thresholds": model.thresholds,
        "metadata": {
            "corpus_size": model.metadata.corpus_size,
            "training_size": model.metadata.training_size,
            "calibration_size": model.metadata.calibration_size,
            "seed": model.metadata.seed,
            "calibration_split": model.metadata.calibration_split,
            "timestamp": model.metadata.timestamp,
            "dropped_labels": list(model.metadata.dropped_labels),
        },
    }
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def model_from_bytes(data: bytes) -> TrainedModel:
    payload = json.loads(data.decode("utf-8"))
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise VersionMismatch(f"model format version {version!r}, expected {MODEL_FORMAT_VERSION}")
    labels = tuple(StatementLabel.from_key(key) for key in payload["labels"])
    space = LabelSpace(labels=labels, omitted_properties=frozenset(payload["omitted_properties"]))
    raw_meta = dict(payload["metadata"])
    raw_meta["dropped_labels"] = tuple(raw_meta.get("dropped_labels", ()))
    meta = ModelMetadata(**raw_meta)
    return TrainedModel(
        label_space=space,
        vocabulary=tuple(payload["vocabulary"]),
        document_frequency=tuple(payload["document_frequency"]),
        idf=tuple(payload["idf"]),
        centroids={key: {int(i): w for i, w in vec} for key, vec in payload["centroids"].items()},
        thresholds=dict(payload["thresholds"]),
        metadata=meta,
    )


def save_model(model: TrainedModel, path) -> str:
    """Write the model file; returns its sha256 checksum."""
    data = model_to_bytes(model)
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def load_model(path) -> TrainedModel:
    return model_from_bytes(Path(path).read_bytes())

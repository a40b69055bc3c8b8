"""Durable store: graph + assay records + curation sessions + model reference.

Snapshots serialize to canonical JSON so identical stores produce identical
bytes; a sidecar manifest records the checksum and format version. Version
mismatches are rejected, never silently migrated.
"""
from __future__ import annotations

import hashlib
import json
import logging
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from . import curation
from .corpus import AnnotatedAssay, GoldStatement, to_graph
from .curation import CurationSession, open_session
from .errors import (
    ChecksumMismatch,
    EmptyText,
    IoFailure,
    ModelUnavailable,
    UnknownAssay,
    UnknownSession,
    VersionMismatch,
)
from .graph import KnowledgeGraph
from .semantify import TrainedModel, load_model, predict

log = logging.getLogger(__name__)

SNAPSHOT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class AssayRecord:
    """One assay known to the store: raw text, optional gold annotation, graph links."""

    assay: AnnotatedAssay
    in_corpus: bool = False
    paper_id: Optional[str] = None
    contribution_id: Optional[str] = None


@dataclass(frozen=True)
class ModelRef:
    path: str
    sha256: str


class Store:
    """Mutable application state behind a single-writer lock."""

    def __init__(self):
        self.lock = threading.RLock()
        self.graph = KnowledgeGraph()
        self.assays: dict[str, AssayRecord] = {}
        self.assay_order: list[str] = []
        self.sessions: dict[str, CurationSession] = {}
        self.session_order: list[str] = []
        self.model: Optional[TrainedModel] = None
        self.model_ref: Optional[ModelRef] = None
        self._counters = {"A": 0, "S": 0}

    # -- assays ---------------------------------------------------------------

    def create_assay(self, text: str, title: Optional[str] = None) -> str:
        """Register a raw assay text (the RQ2 entry point); no dedup by design."""
        if not text.strip():
            raise EmptyText("assay text must be nonempty")
        with self.lock:
            self._counters["A"] += 1
            assay_id = f"A{self._counters['A']}"
            record = AssayRecord(assay=AnnotatedAssay(id=assay_id, text=text, title=title))
            self.assays[assay_id] = record
            self.assay_order.append(assay_id)
            return assay_id

    def assay(self, assay_id: str) -> AssayRecord:
        try:
            return self.assays[assay_id]
        except KeyError:
            raise UnknownAssay(f"no such assay: {assay_id}") from None

    def ingest_corpus(self, assays: list[AnnotatedAssay]) -> list[str]:
        """Store annotated assays and materialize each as paper + contribution."""
        ingested = []
        with self.lock:
            for assay in assays:
                paper, contribution = to_graph(assay, self.graph)
                record = AssayRecord(
                    assay=assay, in_corpus=True, paper_id=paper, contribution_id=contribution
                )
                if assay.id not in self.assays:
                    self.assay_order.append(assay.id)
                self.assays[assay.id] = record
                ingested.append(assay.id)
            return ingested

    def corpus(self) -> list[AnnotatedAssay]:
        """The ingested annotated corpus, in ingest order."""
        return [self.assays[i].assay for i in self.assay_order if self.assays[i].in_corpus]

    # -- sessions ---------------------------------------------------------------

    def semantify_assay(self, assay_id: str, top_k: Optional[int] = None) -> CurationSession:
        with self.lock:
            record = self.assay(assay_id)
            if self.model is None:
                raise ModelUnavailable("no trained model loaded")
            k = top_k if top_k is not None else max(1, len(self.model.label_space))
            predictions = predict(self.model, record.assay.text, top_k=k)
            self._counters["S"] += 1
            session = open_session(
                record.assay.text,
                predictions,
                session_id=f"S{self._counters['S']}",
                assay_id=assay_id,
            )
            self.sessions[session.id] = session
            self.session_order.append(session.id)
            return session

    def session(self, session_id: str) -> CurationSession:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSession(f"no such session: {session_id}") from None

    def finalize_session(self, session_id: str, paper_title: str) -> str:
        with self.lock:
            session = self.session(session_id)
            contribution = curation.finalize(session, self.graph, paper_title)
            if session.assay_id and session.assay_id in self.assays:
                record = self.assays[session.assay_id]
                paper = self.graph.contribution(contribution).paper
                self.assays[session.assay_id] = replace(
                    record, paper_id=paper, contribution_id=contribution
                )
            return contribution

    def resolve_contribution(self, node_id: str) -> str:
        """Accept a contribution id, or an assay id that finalized into one."""
        if self.graph.has_contribution(node_id):
            return node_id
        if node_id in self.assays:
            contribution = self.assays[node_id].contribution_id
            if contribution is not None:
                return contribution
            raise UnknownAssay(f"assay {node_id} has no finalized contribution")
        from .errors import UnknownContribution

        raise UnknownContribution(f"no such contribution: {node_id}")

    def set_model(self, model: Optional[TrainedModel], ref: Optional[ModelRef]) -> None:
        with self.lock:
            self.model = model
            self.model_ref = ref

    # -- snapshot -------------------------------------------------------------

    def to_payload(self) -> dict:
        with self.lock:
            return {
                "format_version": SNAPSHOT_FORMAT_VERSION,
                "counters": dict(self._counters),
                "graph": self.graph.to_payload(),
                "assays": [_assay_record_payload(self.assays[i]) for i in self.assay_order],
                "sessions": [
                    curation.session_to_payload(self.sessions[i]) for i in self.session_order
                ],
                "model_ref": (
                    {"path": self.model_ref.path, "sha256": self.model_ref.sha256}
                    if self.model_ref
                    else None
                ),
            }

    @classmethod
    def from_payload(cls, payload: dict) -> "Store":
        store = cls()
        store._counters.update(payload.get("counters", {}))
        store.graph = KnowledgeGraph.from_payload(payload["graph"])
        for entry in payload.get("assays", []):
            record = _assay_record_from_payload(entry)
            store.assays[record.assay.id] = record
            store.assay_order.append(record.assay.id)
        for entry in payload.get("sessions", []):
            session = curation.session_from_payload(entry)
            store.sessions[session.id] = session
            store.session_order.append(session.id)
        ref = payload.get("model_ref")
        if ref:
            store.model_ref = ModelRef(path=ref["path"], sha256=ref["sha256"])
        return store


def _assay_record_payload(record: AssayRecord) -> dict:
    assay = record.assay
    return {
        "id": assay.id,
        "title": assay.title,
        "text": assay.text,
        "assay_type": assay.assay_type,
        "assay_format": assay.assay_format,
        "statements": [
            {
                "property": s.property,
                "value": s.value,
                "property_uri": s.property_uri,
                "value_uri": s.value_uri,
            }
            for s in assay.statements
        ],
        "in_corpus": record.in_corpus,
        "paper_id": record.paper_id,
        "contribution_id": record.contribution_id,
    }


def _assay_record_from_payload(entry: dict) -> AssayRecord:
    statements = tuple(
        GoldStatement(
            property=s["property"],
            value=s["value"],
            property_uri=s.get("property_uri"),
            value_uri=s.get("value_uri"),
        )
        for s in entry.get("statements", [])
    )
    assay = AnnotatedAssay(
        id=entry["id"],
        text=entry["text"],
        statements=statements,
        title=entry.get("title"),
        assay_type=entry.get("assay_type"),
        assay_format=entry.get("assay_format"),
    )
    return AssayRecord(
        assay=assay,
        in_corpus=entry.get("in_corpus", False),
        paper_id=entry.get("paper_id"),
        contribution_id=entry.get("contribution_id"),
    )


# -- snapshot files ---------------------------------------------------------


def snapshot_bytes(store: Store) -> bytes:
    payload = store.to_payload()
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def _manifest_path(path: Path) -> Path:
    return path.with_name(path.name + ".manifest.json")


def save_snapshot(store: Store, path) -> str:
    """Write the snapshot plus its sidecar manifest; returns the sha256 checksum."""
    target = Path(path)
    data = snapshot_bytes(store)
    checksum = hashlib.sha256(data).hexdigest()
    manifest = {
        "format_version": SNAPSHOT_FORMAT_VERSION,
        "sha256": checksum,
        "snapshot": target.name,
    }
    try:
        target.write_bytes(data)
        _manifest_path(target).write_text(
            json.dumps(manifest, sort_keys=True, separators=(",", ":")) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise IoFailure(f"cannot write snapshot {target}: {exc}") from exc
    return checksum


def load_snapshot(path) -> Store:
    """Load a snapshot, verifying manifest checksum and format version."""
    target = Path(path)
    try:
        data = target.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read snapshot {target}: {exc}") from exc
    manifest_file = _manifest_path(target)
    if manifest_file.exists():
        try:
            manifest = json.loads(manifest_file.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise IoFailure(f"cannot read manifest {manifest_file}: {exc}") from exc
        actual = hashlib.sha256(data).hexdigest()
        if manifest.get("sha256") != actual:
            raise ChecksumMismatch(
                f"snapshot {target} checksum {actual} != manifest {manifest.get('sha256')}"
            )
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IoFailure(f"snapshot {target} is not valid JSON: {exc}") from exc
    version = payload.get("format_version")
    if version != SNAPSHOT_FORMAT_VERSION:
        raise VersionMismatch(
            f"snapshot format version {version!r}, expected {SNAPSHOT_FORMAT_VERSION}"
        )
    store = Store.from_payload(payload)
    if store.model_ref is not None:
        model_path = Path(store.model_ref.path)
        if model_path.exists():
            raw = model_path.read_bytes()
            actual = hashlib.sha256(raw).hexdigest()
            if actual != store.model_ref.sha256:
                raise ChecksumMismatch(
                    f"model file {model_path} checksum {actual} != recorded {store.model_ref.sha256}"
                )
            store.model = load_model(model_path)
        else:
            log.warning("referenced model file %s missing; model not loaded", model_path)
    return store

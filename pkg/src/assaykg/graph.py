"""In-memory knowledge graph of papers, contributions, resources and statements.

Node identifiers are opaque prefix-typed strings minted from per-prefix
counters ("P1", "C1", "R1", "PR1"). Counters only ever grow, so an id is
never reused even after compaction removes the node.

Mutations serialize through an internal lock (single writer); read accessors
return immutable snapshots that are safe to hand across threads.
"""
from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Union

from .errors import (
    DuplicateStatement,
    EmptyLabel,
    EmptyTitle,
    InvalidUri,
    UnknownContribution,
    UnknownPaper,
)

# RFC 3986 scheme followed by a non-empty hier part without whitespace or
# characters the N-Triples IRI production forbids.
_ABSOLUTE_URI_RE = re.compile(r'^[A-Za-z][A-Za-z0-9+.\-]*:[^\s<>"{}|\\^`]+$')

LITERAL_DATATYPES = ("string", "integer", "decimal")

_DECIMAL_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)$")


def normalize_label(label: str) -> str:
    """Lowercase, trim, and collapse internal whitespace runs to one space."""
    return " ".join(label.split()).lower()


def is_absolute_uri(uri: str) -> bool:
    return bool(_ABSOLUTE_URI_RE.match(uri))


def _check_uri(uri: Optional[str]) -> Optional[str]:
    if uri is None:
        return None
    if not isinstance(uri, str) or not is_absolute_uri(uri):
        raise InvalidUri(f"not an absolute URI: {uri!r}")
    return uri


@dataclass(frozen=True)
class Literal:
    """A datatype-marked value; used for things that are not ontology resources."""

    value: str
    datatype: str = "string"

    def __post_init__(self):
        if self.datatype not in LITERAL_DATATYPES:
            raise ValueError(f"unknown literal datatype: {self.datatype!r}")
        if self.datatype == "integer" and not re.fullmatch(r"[+-]?\d+", self.value):
            raise ValueError(f"not an integer literal: {self.value!r}")
        if self.datatype == "decimal" and not _DECIMAL_RE.fullmatch(self.value):
            raise ValueError(f"not a decimal literal: {self.value!r}")


@dataclass(frozen=True)
class Predicate:
    id: str
    label: str
    uri: Optional[str] = None


@dataclass(frozen=True)
class Resource:
    id: str
    label: str
    uri: Optional[str] = None


@dataclass(frozen=True)
class Paper:
    id: str
    title: str
    metadata: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Contribution:
    id: str
    paper: str
    label: str = ""


@dataclass(frozen=True)
class Statement:
    subject: str
    predicate: str
    object: Union[str, Literal]

    def object_key(self):
        if isinstance(self.object, Literal):
            return ("literal", self.object.value, self.object.datatype)
        return ("node", self.object)

    def key(self):
        return (self.subject, self.predicate, self.object_key())


class KnowledgeGraph:
    """Triple store for assay contributions with ontology-URI links."""

    def __init__(self):
        self._lock = threading.RLock()
        self._counters = {"P": 0, "C": 0, "R": 0, "PR": 0}
        self._papers: dict[str, Paper] = {}
        self._contributions: dict[str, Contribution] = {}
        self._resources: dict[str, Resource] = {}
        self._predicates: dict[str, Predicate] = {}
        self._statements: list[Statement] = []
        self._statement_keys: set = set()
        # dedup / reuse indexes
        self._resource_by_key: dict[tuple[str, Optional[str]], str] = {}
        self._resource_by_uri: dict[str, str] = {}
        self._predicate_by_label: dict[str, str] = {}
        self._predicate_by_uri: dict[str, str] = {}

    # -- id minting ---------------------------------------------------------

    def _next_id(self, prefix: str) -> str:
        self._counters[prefix] += 1
        return f"{prefix}{self._counters[prefix]}"

    # -- node creation ------------------------------------------------------

    def create_paper(self, title: str, metadata: Optional[dict[str, str]] = None) -> str:
        title = title.strip()
        if not title:
            raise EmptyTitle("paper title must be nonempty")
        with self._lock:
            pid = self._next_id("P")
            meta = tuple(sorted((metadata or {}).items()))
            self._papers[pid] = Paper(id=pid, title=title, metadata=meta)
            return pid

    def create_contribution(self, paper: str, label: str = "") -> str:
        with self._lock:
            if paper not in self._papers:
                raise UnknownPaper(f"no such paper: {paper}")
            cid = self._next_id("C")
            self._contributions[cid] = Contribution(id=cid, paper=paper, label=label)
            return cid

    def has_predicate_label(self, label: str) -> bool:
        return normalize_label(label) in self._predicate_by_label

    def intern_predicate(self, label: str, uri: Optional[str] = None) -> str:
        """Create-or-reuse a predicate node keyed by normalized label."""
        norm = normalize_label(label)
        if not norm:
            raise EmptyLabel("predicate label must be nonempty")
        uri = _check_uri(uri)
        existing = self._predicate_by_label.get(norm)
        if existing is not None:
            pred = self._predicates[existing]
            if pred.uri is None and uri is not None:
                # first URI seen for this predicate wins; later conflicts ignored
                self._predicates[existing] = replace(pred, uri=uri)
                self._predicate_by_uri.setdefault(uri, existing)
            return existing
        pid = self._next_id("PR")
        self._predicates[pid] = Predicate(id=pid, label=label.strip(), uri=uri)
        self._predicate_by_label[norm] = pid
        if uri is not None:
            self._predicate_by_uri.setdefault(uri, pid)
        return pid

    def intern_resource(self, label: str, uri: Optional[str] = None) -> str:
        """Create-or-reuse a resource node keyed by (normalized label, uri)."""
        norm = normalize_label(label)
        if not norm:
            raise EmptyLabel("resource label must be nonempty")
        uri = _check_uri(uri)
        key = (norm, uri)
        existing = self._resource_by_key.get(key)
        if existing is not None:
            return existing
        rid = self._next_id("R")
        self._resources[rid] = Resource(id=rid, label=label.strip(), uri=uri)
        self._resource_by_key[key] = rid
        if uri is not None:
            self._resource_by_uri.setdefault(uri, rid)
        return rid

    # -- statements -----------------------------------------------------------

    def add_statement(
        self,
        contribution: str,
        predicate_label: str,
        predicate_uri: Optional[str] = None,
        object_label: str = "",
        object_uri: Optional[str] = None,
    ) -> Statement:
        """Create-or-reuse predicate and object resource, then store the triple.

        Raises DuplicateStatement when the triple already exists; in that case
        the graph is unchanged.
        """
        with self._lock:
            if contribution not in self._contributions:
                raise UnknownContribution(f"no such contribution: {contribution}")
            pred_id = self.intern_predicate(predicate_label, predicate_uri)
            obj_id = self.intern_resource(object_label, object_uri)
            return self._store(Statement(contribution, pred_id, obj_id))

    def add_literal_statement(
        self,
        contribution: str,
        predicate_label: str,
        value: str,
        datatype: str = "string",
        predicate_uri: Optional[str] = None,
    ) -> Statement:
        with self._lock:
            if contribution not in self._contributions:
                raise UnknownContribution(f"no such contribution: {contribution}")
            pred_id = self.intern_predicate(predicate_label, predicate_uri)
            return self._store(Statement(contribution, pred_id, Literal(value, datatype)))

    def add_raw_statement(self, subject: str, predicate: str, obj: Union[str, Literal]) -> Statement:
        """Low-level insert used by the N-Triples importer.

        Subject may be a contribution or a resource; node objects must exist.
        """
        with self._lock:
            if subject not in self._contributions and subject not in self._resources:
                raise UnknownContribution(f"unknown statement subject: {subject}")
            if predicate not in self._predicates:
                raise EmptyLabel(f"unknown predicate node: {predicate}")
            if isinstance(obj, str) and obj not in self._resources and obj not in self._contributions:
                raise UnknownContribution(f"unknown statement object: {obj}")
            return self._store(Statement(subject, predicate, obj))

    def _store(self, stmt: Statement) -> Statement:
        key = stmt.key()
        if key in self._statement_keys:
            raise DuplicateStatement(f"triple already present: {key}")
        self._statements.append(stmt)
        self._statement_keys.add(key)
        return stmt

    def remove_statement(self, stmt: Statement) -> bool:
        """Remove one statement; nodes stay until compact() is called."""
        with self._lock:
            key = stmt.key()
            if key not in self._statement_keys:
                return False
            self._statement_keys.remove(key)
            self._statements = [s for s in self._statements if s.key() != key]
            return True

    def compact(self) -> list[str]:
        """Garbage-collect resources and predicates unused by any statement."""
        with self._lock:
            used: set[str] = set()
            for stmt in self._statements:
                used.add(stmt.subject)
                used.add(stmt.predicate)
                if isinstance(stmt.object, str):
                    used.add(stmt.object)
            removed = []
            for rid in list(self._resources):
                if rid not in used:
                    res = self._resources.pop(rid)
                    self._resource_by_key.pop((normalize_label(res.label), res.uri), None)
                    if res.uri is not None and self._resource_by_uri.get(res.uri) == rid:
                        del self._resource_by_uri[res.uri]
                    removed.append(rid)
            for pid in list(self._predicates):
                if pid not in used:
                    pred = self._predicates.pop(pid)
                    self._predicate_by_label.pop(normalize_label(pred.label), None)
                    if pred.uri is not None and self._predicate_by_uri.get(pred.uri) == pid:
                        del self._predicate_by_uri[pred.uri]
                    removed.append(pid)
            return removed

    # -- read accessors -------------------------------------------------------

    def statements_of(self, contribution: str) -> tuple[Statement, ...]:
        """All statements whose subject is the contribution, insertion order."""
        with self._lock:
            if contribution not in self._contributions:
                raise UnknownContribution(f"no such contribution: {contribution}")
            return tuple(s for s in self._statements if s.subject == contribution)

    def statements(self) -> tuple[Statement, ...]:
        with self._lock:
            return tuple(self._statements)

    def paper(self, paper_id: str) -> Paper:
        try:
            return self._papers[paper_id]
        except KeyError:
            raise UnknownPaper(f"no such paper: {paper_id}") from None

    def contribution(self, contribution_id: str) -> Contribution:
        try:
            return self._contributions[contribution_id]
        except KeyError:
            raise UnknownContribution(f"no such contribution: {contribution_id}") from None

    def resource(self, resource_id: str) -> Resource:
        return self._resources[resource_id]

    def predicate(self, predicate_id: str) -> Predicate:
        return self._predicates[predicate_id]

    def has_contribution(self, node_id: str) -> bool:
        return node_id in self._contributions

    def has_resource(self, node_id: str) -> bool:
        return node_id in self._resources

    def paper_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._papers, key=_id_number))

    def contribution_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._contributions, key=_id_number))

    def resource_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._resources, key=_id_number))

    def predicate_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._predicates, key=_id_number))

    def find_contribution_by_label(self, label: str) -> Optional[str]:
        with self._lock:
            for cid in sorted(self._contributions, key=_id_number):
                if self._contributions[cid].label == label:
                    return cid
            return None

    def resource_by_uri(self, uri: str) -> Optional[str]:
        return self._resource_by_uri.get(uri)

    def predicate_by_uri(self, uri: str) -> Optional[str]:
        return self._predicate_by_uri.get(uri)

    def object_label(self, obj: Union[str, Literal]) -> str:
        """Display label of a statement object: resource label or literal value."""
        if isinstance(obj, Literal):
            return obj.value
        if obj in self._resources:
            return self._resources[obj].label
        if obj in self._contributions:
            return self._contributions[obj].label or obj
        return obj

    # -- serialization ----------------------------------------------------------

    def to_payload(self) -> dict:
        """Deterministic plain-data form used by snapshot persistence."""
        with self._lock:
            return {
                "counters": dict(self._counters),
                "papers": [
                    {"id": p.id, "title": p.title, "metadata": [list(kv) for kv in p.metadata]}
                    for p in (self._papers[i] for i in self.paper_ids())
                ],
                "contributions": [
                    {"id": c.id, "paper": c.paper, "label": c.label}
                    for c in (self._contributions[i] for i in self.contribution_ids())
                ],
                "resources": [
                    {"id": r.id, "label": r.label, "uri": r.uri}
                    for r in (self._resources[i] for i in self.resource_ids())
                ],
                "predicates": [
                    {"id": p.id, "label": p.label, "uri": p.uri}
                    for p in (self._predicates[i] for i in self.predicate_ids())
                ],
                "statements": [_statement_payload(s) for s in self._statements],
            }

    @classmethod
    def from_payload(cls, payload: dict) -> "KnowledgeGraph":
        graph = cls()
        graph._counters.update(payload["counters"])
        for p in payload["papers"]:
            meta = tuple((k, v) for k, v in p.get("metadata", []))
            graph._papers[p["id"]] = Paper(id=p["id"], title=p["title"], metadata=meta)
        for c in payload["contributions"]:
            graph._contributions[c["id"]] = Contribution(
                id=c["id"], paper=c["paper"], label=c.get("label", "")
            )
        for r in payload["resources"]:
            res = Resource(id=r["id"], label=r["label"], uri=r.get("uri"))
            graph._resources[res.id] = res
            graph._resource_by_key[(normalize_label(res.label), res.uri)] = res.id
            if res.uri is not None:
                graph._resource_by_uri.setdefault(res.uri, res.id)
        for p in payload["predicates"]:
            pred = Predicate(id=p["id"], label=p["label"], uri=p.get("uri"))
            graph._predicates[pred.id] = pred
            graph._predicate_by_label[normalize_label(pred.label)] = pred.id
            if pred.uri is not None:
                graph._predicate_by_uri.setdefault(pred.uri, pred.id)
        for s in payload["statements"]:
            stmt = _statement_from_payload(s)
            graph._statements.append(stmt)
            graph._statement_keys.add(stmt.key())
        return graph


def _id_number(node_id: str) -> tuple[str, int]:
    m = re.match(r"([A-Z]+)(\d+)$", node_id)
    if m:
        return (m.group(1), int(m.group(2)))
    return (node_id, 0)


def _statement_payload(stmt: Statement) -> dict:
    if isinstance(stmt.object, Literal):
        obj = {"literal": {"value": stmt.object.value, "datatype": stmt.object.datatype}}
    else:
        obj = {"node": stmt.object}
    return {"subject": stmt.subject, "predicate": stmt.predicate, "object": obj}


def _statement_from_payload(payload: dict) -> Statement:
    obj = payload["object"]
    if "literal" in obj:
        lit = obj["literal"]
        return Statement(payload["subject"], payload["predicate"], Literal(lit["value"], lit["datatype"]))
    return Statement(payload["subject"], payload["predicate"], obj["node"])

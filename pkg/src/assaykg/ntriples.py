"""N-Triples export and import for the knowledge graph.

Node subjects and objects are minted under base_uri + "resource/" + id and
predicates under base_uri + "predicate/" + id, unless the node carries an
ontology URI, which is emitted verbatim. Output lines are sorted so equal
graphs always serialize identically.

Import resolves URIs back: base-minted URIs map to existing local nodes;
anything else reuses a node already carrying that URI or creates a fresh
one remembering it. That makes export -> import -> export a fixed point.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import InvalidBaseUri, ParseError
from .graph import (
    KnowledgeGraph,
    Literal,
    Statement,
    is_absolute_uri,
    normalize_label,
)
from .errors import DuplicateStatement, EmptyLabel

DEFAULT_BASE_URI = "http://example.org/assaykg/"

XSD_INTEGER = "http://www.w3.org/2001/XMLSchema#integer"
XSD_DECIMAL = "http://www.w3.org/2001/XMLSchema#decimal"

_DATATYPE_URIS = {"integer": XSD_INTEGER, "decimal": XSD_DECIMAL}
_DATATYPES_BY_URI = {XSD_INTEGER: "integer", XSD_DECIMAL: "decimal"}

_LINE_RE = re.compile(
    r'^\s*<(?P<subject>[^<>"{}|^`\\\s]+)>'
    r'\s+<(?P<predicate>[^<>"{}|^`\\\s]+)>'
    r'\s+(?P<object><[^<>"{}|^`\\\s]+>|"(?:[^"\\\n\r]|\\.)*"(?:\^\^<[^<>"{}|^`\\\s]+>)?)'
    r"\s*\.\s*$"
)

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _check_base_uri(base_uri: str) -> str:
    if not is_absolute_uri(base_uri) or not base_uri.endswith("/"):
        raise InvalidBaseUri(f"base URI must be absolute and end in '/': {base_uri!r}")
    return base_uri


def escape_literal(value: str) -> str:
    out = []
    for ch in value:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def unescape_literal(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(value):
            raise ValueError("dangling escape in literal")
        nxt = value[i + 1]
        simple = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t", "b": "\b", "f": "\f", "'": "'"}
        if nxt in simple:
            out.append(simple[nxt])
            i += 2
        elif nxt == "u":
            out.append(chr(int(value[i + 2 : i + 6], 16)))
            i += 6
        elif nxt == "U":
            out.append(chr(int(value[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise ValueError(f"unknown escape sequence: \\{nxt}")
    return "".join(out)


def export_ntriples(graph: KnowledgeGraph, base_uri: str = DEFAULT_BASE_URI) -> str:
    """One sorted line per statement; empty graph yields an empty stream."""
    base = _check_base_uri(base_uri)
    lines = []
    for stmt in graph.statements():
        subject = _mint_node(graph, stmt.subject, base)
        predicate = _mint_predicate(graph, stmt.predicate, base)
        obj = _render_object(graph, stmt.object, base)
        lines.append(f"<{subject}> <{predicate}> {obj} .")
    lines.sort()
    return "\n".join(lines) + ("\n" if lines else "")


def _mint_node(graph: KnowledgeGraph, node_id: str, base: str) -> str:
    if graph.has_resource(node_id):
        resource = graph.resource(node_id)
        if resource.uri:
            return resource.uri
    return f"{base}resource/{node_id}"


def _mint_predicate(graph: KnowledgeGraph, predicate_id: str, base: str) -> str:
    predicate = graph.predicate(predicate_id)
    return predicate.uri or f"{base}predicate/{predicate_id}"


def _render_object(graph: KnowledgeGraph, obj: Union[str, Literal], base: str) -> str:
    if isinstance(obj, Literal):
        rendered = f'"{escape_literal(obj.value)}"'
        datatype = _DATATYPE_URIS.get(obj.datatype)
        return f"{rendered}^^<{datatype}>" if datatype else rendered
    return f"<{_mint_node(graph, obj, base)}>"


@dataclass
class ImportReport:
    statements_added: int = 0
    duplicates_skipped: int = 0
    resources_created: list[str] = field(default_factory=list)
    predicates_created: list[str] = field(default_factory=list)
    lines_read: int = 0


def import_ntriples(
    source,
    graph: KnowledgeGraph,
    base_uri: str = DEFAULT_BASE_URI,
    partial_apply: bool = False,
) -> ImportReport:
    """Apply an N-Triples stream to the graph.

    By default the file applies transactionally: a malformed line aborts the
    whole import with a ParseError naming the line and the graph is left
    untouched. With partial_apply=True, lines preceding the malformed one
    stay applied.
    """
    base = _check_base_uri(base_uri)
    lines = _read_lines(source)
    report = ImportReport()
    parsed: list[tuple[int, str, str, str]] = []

    if partial_apply:
        for lineno, line in _iter_triples(lines):
            triple = _parse_line(line, lineno)
            _apply_triple(graph, triple, base, report)
            report.lines_read += 1
        return report

    for lineno, line in _iter_triples(lines):
        parsed.append((lineno, *_parse_line(line, lineno)))
    for lineno, subject, predicate, obj in parsed:
        _apply_triple(graph, (subject, predicate, obj), base, report)
        report.lines_read += 1
    return report


def _read_lines(source) -> list[str]:
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8").splitlines()
    if hasattr(source, "read"):
        return source.read().splitlines()
    if isinstance(source, str):
        try:
            is_file = bool(source) and "\n" not in source and Path(source).is_file()
        except (OSError, ValueError):
            is_file = False
        if is_file:
            return Path(source).read_text(encoding="utf-8").splitlines()
        return source.splitlines()
    return list(source)


def _iter_triples(lines: Iterable[str]):
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def _parse_line(line: str, lineno: int) -> tuple[str, str, str]:
    match = _LINE_RE.match(line)
    if not match:
        raise ParseError(f"line {lineno}: not a valid N-Triples statement", line=lineno)
    return match.group("subject"), match.group("predicate"), match.group("object")


def _apply_triple(
    graph: KnowledgeGraph,
    triple: tuple[str, str, str],
    base: str,
    report: ImportReport,
) -> None:
    subject_uri, predicate_uri, obj_text = triple
    subject = _resolve_node(graph, subject_uri, base, report)
    predicate = _resolve_predicate(graph, predicate_uri, base, report)
    obj = _resolve_object(graph, obj_text, base, report)
    try:
        graph.add_raw_statement(subject, predicate, obj)
        report.statements_added += 1
    except DuplicateStatement:
        report.duplicates_skipped += 1


def _resolve_node(graph: KnowledgeGraph, uri: str, base: str, report: ImportReport) -> str:
    minted = f"{base}resource/"
    if uri.startswith(minted):
        local = uri[len(minted):]
        if graph.has_contribution(local):
            return local
        # only map to a local resource that would export back to this URI;
        # a node carrying its own ontology URI is a different node
        if graph.has_resource(local) and graph.resource(local).uri in (None, uri):
            return local
    existing = graph.resource_by_uri(uri)
    if existing is not None:
        return existing
    label = _local_name(uri)
    try:
        rid = graph.intern_resource(label, uri)
    except EmptyLabel:
        rid = graph.intern_resource(uri, uri)
    report.resources_created.append(rid)
    return rid


def _resolve_predicate(graph: KnowledgeGraph, uri: str, base: str, report: ImportReport) -> str:
    minted = f"{base}predicate/"
    if uri.startswith(minted):
        local = uri[len(minted):]
        try:
            if graph.predicate(local).uri in (None, uri):
                return local
        except KeyError:
            pass
    existing = graph.predicate_by_uri(uri)
    if existing is not None:
        return existing
    label = _local_name(uri)
    # label uniqueness: fall back to the full URI when the local name is taken
    if not normalize_label(label) or graph.has_predicate_label(label):
        label = uri
    pid = graph.intern_predicate(label, uri)
    report.predicates_created.append(pid)
    return pid


_LITERAL_RE = re.compile(r'^"(?P<body>(?:[^"\\\n\r]|\\.)*)"(?:\^\^<(?P<datatype>[^<>]*)>)?$')


def _resolve_object(graph: KnowledgeGraph, obj_text: str, base: str, report: ImportReport):
    if obj_text.startswith("<"):
        return _resolve_node(graph, obj_text[1:-1], base, report)
    match = _LITERAL_RE.match(obj_text)
    datatype = _DATATYPES_BY_URI.get(match.group("datatype"), "string")
    return Literal(unescape_literal(match.group("body")), datatype)


def _local_name(uri: str) -> str:
    for sep in ("#", "/"):
        if sep in uri:
            tail = uri.rsplit(sep, 1)[1]
            if tail:
                return tail
    return uri

"""Parsing, validation and profiling of the annotated bioassay corpus.

The corpus format is UTF-8 JSON Lines, one assay per line:

    {"id": "...", "title": "...", "text": "...",
     "assay_type": "...", "assay_format": "...",
     "statements": [{"property": "...", "value": "...",
                     "property_uri": "...", "value_uri": "..."}, ...]}

"id", "text" and "statements" are required; everything else is optional.
Malformed lines yield warnings with their line number and never abort the
whole parse.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import UnreadableSource
from .graph import KnowledgeGraph, is_absolute_uri, normalize_label
from .errors import DuplicateStatement
from .vocab import Vocabulary, default_format_vocabulary, default_type_vocabulary

_TOP_LEVEL_KEYS = {"id", "title", "text", "statements", "assay_type", "assay_format"}
_STATEMENT_KEYS = {"property", "value", "property_uri", "value_uri"}

LABEL_KEY_SEPARATOR = " :: "


@dataclass(frozen=True)
class GoldStatement:
    property: str
    value: str
    property_uri: Optional[str] = None
    value_uri: Optional[str] = None

    def key(self) -> tuple[str, str]:
        return (normalize_label(self.property), normalize_label(self.value))


@dataclass(frozen=True)
class AnnotatedAssay:
    """One raw assay text plus its gold statements."""

    id: str
    text: str
    statements: tuple[GoldStatement, ...] = ()
    title: Optional[str] = None
    assay_type: Optional[str] = None
    assay_format: Optional[str] = None

    def statement_keys(self) -> set[tuple[str, str]]:
        return {s.key() for s in self.statements}


@dataclass(frozen=True)
class CorpusStats:
    assay_count: int
    statements_min: Optional[int]
    statements_max: Optional[int]
    statements_mean: float
    distinct_types: int
    distinct_formats: int
    per_label_frequency: dict[str, int] = field(default_factory=dict)


def _open_lines(source) -> Iterable[str]:
    if isinstance(source, (str, Path)):
        try:
            return Path(source).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise UnreadableSource(f"cannot read corpus source: {exc}") from exc
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        try:
            return source.read().splitlines()
        except (OSError, ValueError) as exc:
            raise UnreadableSource(f"cannot read corpus stream: {exc}") from exc
    return list(source)


def parse_corpus(
    source,
    type_vocabulary: Optional[Vocabulary] = None,
    format_vocabulary: Optional[Vocabulary] = None,
) -> tuple[list[AnnotatedAssay], list[str]]:
    """Parse a JSON-lines corpus into assays plus line-level warnings.

    Valid records come back in file order. A malformed line is skipped with a
    warning naming it; duplicate (property, value) pairs within one record are
    collapsed to the first occurrence with a warning.
    """
    types = type_vocabulary or default_type_vocabulary()
    formats = format_vocabulary or default_format_vocabulary()
    assays: list[AnnotatedAssay] = []
    warnings: list[str] = []

    for lineno, raw in enumerate(_open_lines(source), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            warnings.append(f"line {lineno}: invalid JSON ({exc.msg})")
            continue
        if not isinstance(record, dict):
            warnings.append(f"line {lineno}: record is not a JSON object")
            continue

        for key in sorted(set(record) - _TOP_LEVEL_KEYS):
            warnings.append(f"line {lineno}: unknown key {key!r} ignored")

        assay_id = record.get("id")
        if not isinstance(assay_id, str) or not assay_id.strip():
            warnings.append(f"line {lineno}: missing or empty 'id'; record skipped")
            continue
        text = record.get("text")
        if not isinstance(text, str) or not text.strip():
            warnings.append(f"line {lineno}: missing or empty 'text'; record skipped")
            continue
        raw_statements = record.get("statements")
        if not isinstance(raw_statements, list):
            warnings.append(f"line {lineno}: 'statements' missing or not a list; record skipped")
            continue

        statements: list[GoldStatement] = []
        seen: set[tuple[str, str]] = set()
        for pos, item in enumerate(raw_statements):
            stmt = _parse_statement(item, lineno, pos, warnings)
            if stmt is None:
                continue
            if stmt.key() in seen:
                warnings.append(
                    f"line {lineno}: duplicate statement ({stmt.property!r}, {stmt.value!r}) collapsed"
                )
                continue
            seen.add(stmt.key())
            statements.append(stmt)

        title = record.get("title")
        if title is not None and not isinstance(title, str):
            warnings.append(f"line {lineno}: non-text 'title' ignored")
            title = None
        assay_type = _optional_label(record.get("assay_type"), "assay_type", lineno, warnings)
        assay_format = _optional_label(record.get("assay_format"), "assay_format", lineno, warnings)
        if assay_type and assay_type not in types:
            warnings.append(f"line {lineno}: assay_type {assay_type!r} not in type vocabulary")
        if assay_format and assay_format not in formats:
            warnings.append(f"line {lineno}: assay_format {assay_format!r} not in format vocabulary")

        assays.append(
            AnnotatedAssay(
                id=assay_id.strip(),
                text=text,
                statements=tuple(statements),
                title=title,
                assay_type=assay_type,
                assay_format=assay_format,
            )
        )
    return assays, warnings


def _parse_statement(item, lineno: int, pos: int, warnings: list[str]) -> Optional[GoldStatement]:
    if not isinstance(item, dict):
        warnings.append(f"line {lineno}: statement #{pos + 1} is not an object; dropped")
        return None
    prop = item.get("property")
    value = item.get("value")
    if not isinstance(prop, str) or not normalize_label(prop):
        warnings.append(f"line {lineno}: statement #{pos + 1} has no usable 'property'; dropped")
        return None
    if not isinstance(value, str) or not normalize_label(value):
        warnings.append(f"line {lineno}: statement #{pos + 1} has no usable 'value'; dropped")
        return None
    prop_uri = _optional_uri(item.get("property_uri"), "property_uri", lineno, pos, warnings)
    value_uri = _optional_uri(item.get("value_uri"), "value_uri", lineno, pos, warnings)
    return GoldStatement(property=prop, value=value, property_uri=prop_uri, value_uri=value_uri)


def _optional_uri(value, name: str, lineno: int, pos: int, warnings: list[str]) -> Optional[str]:
    if value is None:
        return None
    if not isinstance(value, str) or not is_absolute_uri(value):
        warnings.append(f"line {lineno}: statement #{pos + 1} {name} {value!r} is not an absolute URI; dropped")
        return None
    return value


def _optional_label(value, name: str, lineno: int, warnings: list[str]) -> Optional[str]:
    if value is None:
        return None
    if not isinstance(value, str) or not normalize_label(value):
        warnings.append(f"line {lineno}: non-text {name!r} ignored")
        return None
    return value


def serialize_corpus(assays: Iterable[AnnotatedAssay]) -> str:
    """Render assays back to canonical JSON Lines (round-trips with parse_corpus)."""
    lines = []
    for assay in assays:
        record: dict = {"id": assay.id}
        if assay.title is not None:
            record["title"] = assay.title
        record["text"] = assay.text
        if assay.assay_type is not None:
            record["assay_type"] = assay.assay_type
        if assay.assay_format is not None:
            record["assay_format"] = assay.assay_format
        record["statements"] = []
        for stmt in assay.statements:
            entry = {"property": stmt.property, "value": stmt.value}
            if stmt.property_uri is not None:
                entry["property_uri"] = stmt.property_uri
            if stmt.value_uri is not None:
                entry["value_uri"] = stmt.value_uri
            record["statements"].append(entry)
        lines.append(json.dumps(record, ensure_ascii=False, separators=(", ", ": ")))
    return "\n".join(lines) + ("\n" if lines else "")


def compute_stats(corpus: list[AnnotatedAssay]) -> CorpusStats:
    """Exact arithmetic over deduplicated statement counts."""
    if not corpus:
        return CorpusStats(0, None, None, 0.0, 0, 0, {})
    counts = [len(a.statements) for a in corpus]
    types = {normalize_label(a.assay_type) for a in corpus if a.assay_type}
    formats = {normalize_label(a.assay_format) for a in corpus if a.assay_format}
    freq: dict[str, int] = {}
    for assay in corpus:
        for stmt in assay.statements:
            key = LABEL_KEY_SEPARATOR.join(stmt.key())
            freq[key] = freq.get(key, 0) + 1
    return CorpusStats(
        assay_count=len(corpus),
        statements_min=min(counts),
        statements_max=max(counts),
        statements_mean=sum(counts) / len(counts),
        distinct_types=len(types),
        distinct_formats=len(formats),
        per_label_frequency=freq,
    )


def to_graph(assay: AnnotatedAssay, graph: KnowledgeGraph) -> tuple[str, str]:
    """Ingest one assay as a paper + contribution carrying its gold statements.

    Idempotent per assay id: the contribution is looked up by label, and
    re-added statements are absorbed, so re-ingestion never grows the graph.
    """
    contribution = graph.find_contribution_by_label(assay.id)
    if contribution is None:
        paper = graph.create_paper(assay.title or assay.id)
        contribution = graph.create_contribution(paper, label=assay.id)
    else:
        paper = graph.contribution(contribution).paper
    for stmt in assay.statements:
        try:
            graph.add_statement(
                contribution,
                predicate_label=stmt.property,
                predicate_uri=stmt.property_uri,
                object_label=stmt.value,
                object_uri=stmt.value_uri,
            )
        except DuplicateStatement:
            pass
    return paper, contribution

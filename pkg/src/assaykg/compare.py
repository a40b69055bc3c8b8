"""Property-aligned comparison tables across contributions, plus similar-assay search.

Rows are the union of the selected contributions' properties; predicates
unify on ontology-URI equality first, then on normalized label. Rows sort by
coverage (number of nonempty cells) descending, then property label ascending
case-insensitively. Similarity is Jaccard over normalized statement keys.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import EmptySelection, UnknownContribution
from .graph import KnowledgeGraph, Literal, normalize_label

CELL_VALUE_JOIN = "; "


@dataclass(frozen=True)
class ComparisonColumn:
    contribution: str
    title: str


@dataclass(frozen=True)
class ComparisonRow:
    property: str
    uri: Optional[str]
    cells: tuple[tuple[str, ...], ...]
    coverage: int


@dataclass(frozen=True)
class ComparisonTable:
    columns: tuple[ComparisonColumn, ...]
    rows: tuple[ComparisonRow, ...]


@dataclass(frozen=True)
class SimilarityResult:
    contribution: str
    score: float


def build_comparison(graph: KnowledgeGraph, contributions: Sequence[str]) -> ComparisonTable:
    """Aggregate the selected contributions' statements into a survey table."""
    selected = list(dict.fromkeys(contributions))
    if not selected:
        raise EmptySelection("comparison needs at least one contribution")
    for cid in selected:
        if not graph.has_contribution(cid):
            raise UnknownContribution(f"no such contribution: {cid}")

    columns = tuple(
        ComparisonColumn(contribution=cid, title=graph.paper(graph.contribution(cid).paper).title)
        for cid in selected
    )

    # group predicates by URI when present, else by normalized label
    per_contribution = {cid: graph.statements_of(cid) for cid in selected}
    groups: dict[tuple, dict] = {}
    for cid in selected:
        for stmt in per_contribution[cid]:
            predicate = graph.predicate(stmt.predicate)
            key = ("uri", predicate.uri) if predicate.uri else ("label", normalize_label(predicate.label))
            group = groups.setdefault(key, {"predicates": set(), "values": {c: [] for c in selected}})
            group["predicates"].add(predicate.id)
            group["values"][cid].append(graph.object_label(stmt.object))

    rows = []
    for key, group in groups.items():
        representative = min(group["predicates"], key=_predicate_order)
        predicate = graph.predicate(representative)
        cells = tuple(tuple(sorted(group["values"][cid])) for cid in selected)
        coverage = sum(1 for cell in cells if cell)
        rows.append(
            ComparisonRow(property=predicate.label, uri=predicate.uri, cells=cells, coverage=coverage)
        )
    rows.sort(key=lambda r: (-r.coverage, r.property.lower(), r.uri or ""))
    return ComparisonTable(columns=columns, rows=tuple(rows))


def _predicate_order(predicate_id: str) -> int:
    return int(predicate_id[2:]) if predicate_id.startswith("PR") else 0


def jaccard_similarity(a: set, b: set) -> float:
    """Intersection over union; two empty sets count as identical (1.0)."""
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def statement_key_set(
    graph: KnowledgeGraph, contribution: str, properties_only: bool = False
) -> frozenset:
    """Normalized statement keys of one contribution, for similarity scoring."""
    keys = set()
    for stmt in graph.statements_of(contribution):
        prop = normalize_label(graph.predicate(stmt.predicate).label)
        if properties_only:
            keys.add(prop)
        else:
            keys.add((prop, normalize_label(graph.object_label(stmt.object))))
    return frozenset(keys)


def find_similar(
    graph: KnowledgeGraph,
    query: str,
    k: int,
    properties_only: bool = False,
) -> list[SimilarityResult]:
    """Top-k contributions by Jaccard score against the query's statement set."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not graph.has_contribution(query):
        raise UnknownContribution(f"no such contribution: {query}")
    query_keys = statement_key_set(graph, query, properties_only)
    results = []
    for cid in graph.contribution_ids():
        if cid == query:
            continue
        score = jaccard_similarity(query_keys, statement_key_set(graph, cid, properties_only))
        results.append(SimilarityResult(contribution=cid, score=score))
    results.sort(key=lambda r: (-r.score, _contribution_order(r.contribution)))
    return results[:k]


def _contribution_order(contribution_id: str) -> tuple:
    if contribution_id[1:].isdigit():
        return (0, int(contribution_id[1:]), contribution_id)
    return (1, 0, contribution_id)


# -- renderers -----------------------------------------------------------------


def render_text(table: ComparisonTable) -> str:
    """Plain-text grid; multiple cell values joined with '; '."""
    header = ["property"] + [c.contribution for c in table.columns]
    body = [
        [row.property] + [CELL_VALUE_JOIN.join(cell) for cell in row.cells]
        for row in table.rows
    ]
    widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]
    lines = [
        "  ".join(value.ljust(width) for value, width in zip(header, widths)).rstrip(),
        "  ".join("-" * width for width in widths),
    ]
    for line in body:
        lines.append("  ".join(value.ljust(width) for value, width in zip(line, widths)).rstrip())
    return "\n".join(lines) + "\n"


def render_csv(table: ComparisonTable) -> str:
    """RFC 4180 CSV: header row 'property', then contribution ids."""
    out = io.StringIO()
    writer = csv.writer(out, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow(["property"] + [c.contribution for c in table.columns])
    for row in table.rows:
        writer.writerow([row.property] + [CELL_VALUE_JOIN.join(cell) for cell in row.cells])
    return out.getvalue()


def to_json_dict(table: ComparisonTable) -> dict:
    """Structured form mirroring the table; consumed by the UI."""
    return {
        "columns": [{"contribution": c.contribution, "title": c.title} for c in table.columns],
        "rows": [
            {
                "property": row.property,
                "uri": row.uri,
                "coverage": row.coverage,
                "cells": [list(cell) for cell in row.cells],
            }
            for row in table.rows
        ],
    }


def render_json(table: ComparisonTable) -> str:
    return json.dumps(to_json_dict(table), ensure_ascii=False, indent=2) + "\n"

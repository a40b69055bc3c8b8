"""Controlled vocabularies for assay types and assay formats.

The type list mirrors the published bioassay-type inventory; note that
"beta lactamase reporter gene" is listed twice there, so the deduplicated
vocabulary holds 41 distinct entries. Both vocabularies are seeds, not a
closed world: unknown labels are warned about, never rejected.
"""
from __future__ import annotations

from dataclasses import dataclass

from .graph import normalize_label

DEFAULT_ASSAY_TYPES = (
    "protein-protein interaction",
    "hydrolase activity",
    "kinase activity",
    "protein-small molecule interaction",
    "viability",
    "beta lactamase reporter gene",
    "cytochrome P450 enzyme activity",
    "luciferase enzyme activity",
    "luciferase reporter gene",
    "oxidoreductase activity",
    "protein unfolding",
    "chaperone activity",
    "lyase activity",
    "transporter",
    "plasma membrane potential",
    "dye redistribution",
    "calcium redistribution",
    "apoptosis",
    "beta lactamase reporter gene",
    "beta galactosidase reporter gene",
    "phosphatase activity",
    "cAMP redistribution",
    "IP1 redistribution",
    "cell morphology",
    "phosphorylation",
    "transferase activity",
    "isomerase activity",
    "protein redistribution",
    "radioligand binding",
    "signal transduction",
    "ion channel",
    "platelet activation",
    "fluorescent protein reporter gene",
    "protein-DNA interaction",
    "protease activity",
    "cell permeability",
    "protein stability",
    "protein-turnover",
    "localization",
    "organism behavior",
    "cytotoxicity",
    "cell growth",
)

# BioAssay Ontology assay-format branch; the corpus is reported to use 11.
DEFAULT_ASSAY_FORMATS = (
    "biochemical format",
    "cell-based format",
    "cell-free format",
    "cell membrane format",
    "microsome format",
    "nucleic acid format",
    "organism-based format",
    "physicochemical format",
    "small molecule physicochemical format",
    "tissue-based format",
    "whole organism format",
)


@dataclass(frozen=True)
class Vocabulary:
    """A set of normalized labels used for warn-not-reject validation."""

    entries: frozenset[str]

    @classmethod
    def from_labels(cls, labels) -> "Vocabulary":
        normalized = frozenset(normalize_label(x) for x in labels if normalize_label(x))
        if not normalized:
            raise ValueError("vocabulary must have at least one entry")
        return cls(entries=normalized)

    def __contains__(self, label: str) -> bool:
        return normalize_label(label) in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def default_type_vocabulary() -> Vocabulary:
    return Vocabulary.from_labels(DEFAULT_ASSAY_TYPES)


def default_format_vocabulary() -> Vocabulary:
    return Vocabulary.from_labels(DEFAULT_ASSAY_FORMATS)

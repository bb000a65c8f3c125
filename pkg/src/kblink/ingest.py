"""Harvest index material from a triple stream.

One pass over the triples collects the KB graph, labels, types,
descriptions and per-resource context bags; the surface-form records for
the label, person-name and rare-reference sources are derived from that.
"""
from __future__ import annotations

import enum
import itertools
import json
from collections import Counter
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .kbgraph import KbGraph
from .rdf import Literal, Triple
from .tagger import RuleTagger, extract_rare_references
from .text import bag_of_words, load_stopwords, read_stopword_file


@dataclass
class IngestConfig:
    label_predicates: List[str]
    type_predicates: List[str]
    description_predicates: List[str]
    person_type_iris: List[str]
    max_name_tokens_for_permutation: int = 5
    language: str = "en"
    # accepted language tags for labels/descriptions; empty accepts all
    label_languages: List[str] = field(default_factory=list)
    stopword_file: Optional[str] = None
    kb_name: str = "kb"

    def __post_init__(self):
        for name in ("label_predicates", "type_predicates", "description_predicates"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        if self.max_name_tokens_for_permutation < 1:
            raise ValueError("max_name_tokens_for_permutation must be >= 1")

    @classmethod
    def default(cls) -> "IngestConfig":
        text = resources.files("kblink").joinpath("data", "ingest_default.json").read_text("utf-8")
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_dict(cls, data: dict) -> "IngestConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown ingest config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "IngestConfig":
        base = asdict(cls.default())
        base.update(json.loads(Path(path).read_text(encoding="utf-8")))
        return cls.from_dict(base)

    def stopwords(self) -> FrozenSet[str]:
        if self.stopword_file:
            return read_stopword_file(self.stopword_file)
        return load_stopwords(self.language)

    def accepts(self, literal: Literal) -> bool:
        return not self.label_languages or literal.language is None or literal.language in self.label_languages


class SurfaceSource(str, enum.Enum):
    LABEL = "label"
    PERSON_PERMUTATION = "person"
    RARE_REFERENCE = "rare"


@dataclass(frozen=True, order=True)
class SurfaceFormRecord:
    resource: str
    surface: str
    is_principal: bool = False
    source: SurfaceSource = SurfaceSource.LABEL

    def __post_init__(self):
        if not self.surface.strip():
            raise ValueError("surface must be non-empty")


def person_name_permutations(name: str, max_tokens: int = 5) -> Set[str]:
    """All orderings of all non-empty token subsets of a person label.

    Hyphenated tokens contribute their parts as extra tokens. Above
    ``max_tokens`` tokens only the full label and single tokens are kept.
    """
    tokens: List[str] = []
    for tok in name.split():
        tokens.append(tok)
        if "-" in tok:
            tokens.extend(p for p in tok.split("-") if p)
    if not tokens:
        return set()
    if len(tokens) > max_tokens:
        return {" ".join(name.split()), *tokens}
    out = set()
    for k in range(1, len(tokens) + 1):
        for combo in itertools.permutations(tokens, k):
            out.add(" ".join(combo))
    return out


def build_context_documents(triples: Iterable[Triple], resource: str, stopwords: FrozenSet[str] = frozenset()) -> Counter:
    """Token bag of every literal whose subject is ``resource``."""
    return bag_of_words(
        (o.text for s, _, o in triples if s == resource and isinstance(o, Literal)), stopwords
    )


@dataclass
class KbExtract:
    """Everything the index builder needs, collected in one pass."""

    graph: KbGraph
    labels: Dict[str, List[Tuple[int, str, Optional[str]]]]
    types: Dict[str, Set[str]]
    descriptions: Dict[str, List[Tuple[int, str, Optional[str]]]]
    context: Dict[str, Counter]
    triple_count: int


def collect(triples: Iterable[Triple], config: IngestConfig) -> KbExtract:
    label_rank = {p: i for i, p in enumerate(config.label_predicates)}
    desc_rank = {p: i for i, p in enumerate(config.description_predicates)}
    type_preds = set(config.type_predicates)
    stopwords = config.stopwords()

    nodes: Set[str] = set()
    edges: Set[Tuple[str, str]] = set()
    labels: Dict[str, list] = {}
    types: Dict[str, Set[str]] = {}
    descriptions: Dict[str, list] = {}
    context: Dict[str, Counter] = {}
    count = 0
    for s, p, o in triples:
        count += 1
        s = str(s)
        nodes.add(s)
        if isinstance(o, Literal):
            bag = context.get(s)
            if bag is None:
                bag = context[s] = Counter()
            bag.update(bag_of_words((o.text,), stopwords))
            if p in label_rank and config.accepts(o):
                labels.setdefault(s, []).append((label_rank[p], o.text, o.language))
            elif p in desc_rank and config.accepts(o):
                descriptions.setdefault(s, []).append((desc_rank[p], o.text, o.language))
        else:
            o = str(o)
            nodes.add(o)
            edges.add((s, o))
            if p in type_preds:
                types.setdefault(s, set()).add(o)
    context = {r: c for r, c in context.items() if c}
    return KbExtract(KbGraph.from_edges(nodes, edges), labels, types, descriptions, context, count)


def _principal(entries: List[Tuple[int, str, Optional[str]]], language: str) -> Optional[str]:
    first = [(text, lang) for rank, text, lang in entries if rank == 0 and text.strip()]
    if not first:
        return None
    for text, lang in first:
        if lang == language:
            return text.strip()
    return first[0][0].strip()


def label_records(extract: KbExtract, config: IngestConfig) -> List[SurfaceFormRecord]:
    records = []
    for resource, entries in extract.labels.items():
        principal = _principal(entries, config.language)
        seen = set()
        for _, text, _ in entries:
            surface = text.strip()
            if not surface or surface in seen:
                continue
            seen.add(surface)
            records.append(SurfaceFormRecord(resource, surface, surface == principal, SurfaceSource.LABEL))
    return sorted(records)


def extract_surface_forms(triples: Iterable[Triple], config: IngestConfig) -> List[SurfaceFormRecord]:
    """Label records: one per (resource, label text); principal flags set."""
    return label_records(collect(triples, config), config)


def extract_types(triples: Iterable[Triple], config: IngestConfig) -> Dict[str, FrozenSet[str]]:
    preds = set(config.type_predicates)
    types: Dict[str, Set[str]] = {}
    for s, p, o in triples:
        if p in preds and not isinstance(o, Literal):
            types.setdefault(str(s), set()).add(str(o))
    return {r: frozenset(t) for r, t in types.items()}


def surface_records(extract: KbExtract, config: IngestConfig, tagger=None) -> List[SurfaceFormRecord]:
    """Label, person-name and rare-reference records, deduplicated per resource.

    A surface already present from an earlier source keeps that source.
    """
    records = label_records(extract, config)
    have = {(r.resource, r.surface) for r in records}
    persons = set(config.person_type_iris)
    extra = []
    for resource, entries in extract.labels.items():
        if not (extract.types.get(resource, set()) & persons):
            continue
        for _, text, _ in entries:
            for name in person_name_permutations(text, config.max_name_tokens_for_permutation):
                if (resource, name) not in have:
                    have.add((resource, name))
                    extra.append(SurfaceFormRecord(resource, name, False, SurfaceSource.PERSON_PERMUTATION))
    tagger = tagger or RuleTagger(language=config.language)
    for resource, entries in extract.descriptions.items():
        for _, text, lang in entries:
            if lang is not None and lang != config.language:
                continue
            for phrase in extract_rare_references(text, tagger):
                if (resource, phrase) not in have:
                    have.add((resource, phrase))
                    extra.append(SurfaceFormRecord(resource, phrase, False, SurfaceSource.RARE_REFERENCE))
    return records + sorted(extra)

"""Candidate generation for entity mentions.

Tiers run in a fixed order and the first non-empty tier wins: acronym
expansion (acronym mentions only), label search, label search on the
stemmed mention, then the context index. The popularity sort and the
candidate cap are applied to whichever tier produced the result.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .config import LinkerConfig
from .index import ContextQuery, IndexBundle, ScoredSurfaceHit, direct_link_count
from .text import is_acronym, normalize, stem_mention, trigram_similarity


@dataclass(frozen=True, order=True)
class Mention:
    start: int
    end: int
    text: str


class SpanError(ValueError):
    pass


@dataclass(frozen=True)
class Document:
    text: str
    mentions: Tuple[Mention, ...]

    @classmethod
    def from_spans(cls, text: str, spans: Iterable[Tuple[int, int]]) -> "Document":
        mentions = []
        for start, end in spans:
            if not (isinstance(start, int) and isinstance(end, int)):
                raise SpanError(f"span offsets must be integers: {start!r}, {end!r}")
            if not 0 <= start < end <= len(text):
                raise SpanError(f"span [{start}, {end}) out of bounds for text of length {len(text)}")
            mentions.append(Mention(start, end, text[start:end]))
        ordered = sorted(mentions)
        for a, b in zip(ordered, ordered[1:]):
            if b.start < a.end:
                raise SpanError(f"overlapping spans [{a.start}, {a.end}) and [{b.start}, {b.end})")
        return cls(text, tuple(mentions))


class Origin(str, enum.Enum):
    ACRONYM = "acronym"
    LABEL = "label"
    STEMMED_LABEL = "stemmed_label"
    CONTEXT = "context"


@dataclass(frozen=True)
class Candidate:
    resource: str
    matched_surface: str
    trigram_score: float
    popularity: float
    origin: Origin


def _tokens(mention: Mention) -> List[str]:
    text = mention.text.strip()
    if is_acronym(text):
        return [text]
    return normalize(text).split()


def _is_subsequence(short: Sequence[str], long: Sequence[str]) -> bool:
    it = iter(long)
    return all(tok in it for tok in short)


def resolve_coreferences(mentions: Sequence[Mention]) -> List[List[Mention]]:
    """Group each mention under the longest mention whose tokens contain it as a subsequence.

    Only strictly longer mentions absorb shorter ones. Groups come back
    head first, in document order of their heads.
    """
    toks = {m: _tokens(m) for m in mentions}
    head: Dict[Mention, Mention] = {}
    for a in mentions:
        best = None
        for b in mentions:
            if len(toks[b]) > len(toks[a]) and _is_subsequence(toks[a], toks[b]):
                if best is None or (len(toks[b]), -b.start) > (len(toks[best]), -best.start):
                    best = b
        head[a] = best or a
    # resolve chains to their top
    for a in mentions:
        h = head[a]
        while head[h] != h:
            h = head[h]
        head[a] = h
    groups: Dict[Mention, List[Mention]] = {}
    for m in sorted(mentions):
        groups.setdefault(head[m], [])
    for m in sorted(mentions):
        if m != head[m]:
            groups[head[m]].append(m)
    return [[h, *members] for h, members in sorted(groups.items())]


def coreference_heads(mentions: Sequence[Mention]) -> Dict[Mention, Mention]:
    return {m: group[0] for group in resolve_coreferences(mentions) for m in group}


def popularity_rerank(candidates: Sequence[Candidate], cap: int) -> List[Candidate]:
    if cap < 1:
        raise ValueError("cap must be >= 1")
    return sorted(candidates, key=lambda c: (-c.popularity, -c.trigram_score, c.resource))[:cap]


def _from_hits(hits: Iterable[ScoredSurfaceHit], origin: Origin) -> List[Candidate]:
    out: Dict[str, Candidate] = {}
    for h in hits:
        if h.resource not in out:
            out[h.resource] = Candidate(h.resource, h.surface, h.trigram_score, h.popularity, origin)
    return list(out.values())


def best_subsurface_match(query: str, surface: str) -> float:
    """Best trigram similarity between ``query`` and the surface or any of its
    contiguous token windows as long as the query."""
    best = trigram_similarity(query, surface)
    q_len = len(query.split())
    toks = surface.split()
    for i in range(len(toks) - q_len + 1):
        best = max(best, trigram_similarity(query, " ".join(toks[i : i + q_len])))
    return best


def _context_candidates(
    query: str, co_mentions: Sequence[str], index: IndexBundle, config: LinkerConfig
) -> List[Candidate]:
    ranked = index.search_context(ContextQuery(query, tuple(co_mentions)), config.retrieval_limit)
    pool = [iri for iri, _ in ranked]
    survivors = []
    for iri in pool:
        best, matched = 0.0, ""
        for surface in index.surfaces_of(iri):
            score = best_subsurface_match(query, surface)
            if score > best:
                best, matched = score, surface
        if best >= config.sigma:
            survivors.append(Candidate(iri, matched, best, index.popularity.get(iri), Origin.CONTEXT))
    linked = [c for c in survivors if direct_link_count(c.resource, pool, index.graph) > 0]
    return linked or survivors


def generate_candidates(
    document: Document,
    mention: Mention,
    index: IndexBundle,
    config: LinkerConfig,
    heads: Optional[Mapping[Mention, Mention]] = None,
) -> List[Candidate]:
    if config.use_coreference:
        if heads is None:
            heads = coreference_heads(document.mentions)
        target = heads.get(mention, mention)
    else:
        target = mention
    raw = target.text.strip()
    limit = config.retrieval_limit
    candidates: List[Candidate] = []

    if is_acronym(raw):
        query = raw
        if config.use_acronyms:
            hits: List[ScoredSurfaceHit] = []
            for expansion in index.search_acronym(raw):
                hits.extend(index.search_surface(expansion, config.sigma, True, limit))
            hits.sort(key=lambda h: (-h.trigram_score, h.resource, h.surface))
            candidates = _from_hits(hits, Origin.ACRONYM)
        if not candidates:
            candidates = _from_hits(index.search_surface(query, config.sigma, True, limit), Origin.LABEL)
    else:
        query = normalize(raw)
        if not query:
            return []
        candidates = _from_hits(index.search_surface(query, config.sigma, True, limit), Origin.LABEL)
        if not candidates:
            stemmed = stem_mention(query, config.language)
            if stemmed and stemmed != query:
                candidates = _from_hits(
                    index.search_surface(stemmed, config.sigma, True, limit), Origin.STEMMED_LABEL
                )

    if not candidates and config.use_context_search:
        others = [m.text for m in document.mentions if m != mention]
        candidates = _context_candidates(query, others, index, config)

    if config.use_popularity:
        return popularity_rerank(candidates, config.candidate_cap)
    return candidates[: config.candidate_cap]

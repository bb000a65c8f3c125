"""The five-part lookup index and its on-disk form.

Layout of an index directory (all UTF-8 text, one JSON value per line,
sorted so that identical inputs give byte-identical files):

    manifest.json     format version, KB name, ingest config, counts, schemes
    surfaces.jsonl    [surface_key, [[iri, is_principal, source], ...]]
    trigrams.jsonl    [trigram, [surface_id, ...]]
    context.jsonl     [iri, {term: count}]
    acronyms.tsv      ACRONYM<TAB>expansion
    popularity.jsonl  [iri, score]
    graph.jsonl       [iri, [successor iri, ...]]
    types.jsonl       [iri, [type iri, ...]]
"""
from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .ingest import IngestConfig, KbExtract, SurfaceFormRecord, collect, surface_records
from .kbgraph import KbGraph, PopularityMethod, PopularityTable, compute_popularity
from .rdf import ParseStats, Triple, read_ntriples_files
from .text import bag_of_words, is_numeric, jaccard, surface_key, trigram_set, word_tokens

FORMAT_VERSION = 1
TFIDF_SCHEME = "tf=raw count; idf=ln(N/df); score=sum(query_count*tf*idf); no length normalization"
TRIGRAM_SCHEME = "lowercase; two NUL sentinels each side; Jaccard"


class BundleError(RuntimeError):
    pass


@dataclass(frozen=True)
class ScoredSurfaceHit:
    resource: str
    surface: str
    trigram_score: float
    is_principal: bool
    popularity: float


@dataclass(frozen=True)
class ContextQuery:
    mention_text: str
    co_mention_texts: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.mention_text:
            raise ValueError("mention_text must be non-empty")

    def terms(self) -> Counter:
        bag = bag_of_words(self.co_mention_texts)
        for _ in range(2):
            bag.update(word_tokens(self.mention_text))
        return bag


def read_acronym_file(path) -> Dict[str, List[str]]:
    acronyms: Dict[str, List[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            key, sep, expansion = line.partition("\t")
            if not sep or not key.strip() or not expansion.strip():
                continue
            bucket = acronyms.setdefault(key.strip(), [])
            if expansion.strip() not in bucket:
                bucket.append(expansion.strip())
    return acronyms


@dataclass
class IndexBundle:
    surfaces: List[str]
    postings: List[Tuple[Tuple[str, bool, str], ...]]
    trigrams: Dict[str, Tuple[int, ...]]
    context_docs: Dict[str, Counter]
    acronyms: Dict[str, List[str]]
    popularity: PopularityTable
    graph: KbGraph
    types: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    manifest: dict = field(default_factory=dict)

    def __post_init__(self):
        self._surface_id = {s: i for i, s in enumerate(self.surfaces)}
        self._principal: Dict[str, List[str]] = {}
        self._resource_surfaces: Dict[str, List[str]] = {}
        for sid, posting in enumerate(self.postings):
            key = self.surfaces[sid]
            for iri, principal, _ in posting:
                if principal:
                    self._principal.setdefault(key, []).append(iri)
                self._resource_surfaces.setdefault(iri, []).append(key)
        df: Counter = Counter()
        self._context_postings: Dict[str, List[Tuple[str, int]]] = {}
        for iri in sorted(self.context_docs):
            for term, tf in self.context_docs[iri].items():
                df[term] += 1
                self._context_postings.setdefault(term, []).append((iri, tf))
        n_docs = len(self.context_docs)
        self._idf = {t: math.log(n_docs / d) for t, d in df.items()}

    # -- lookups -----------------------------------------------------------

    @property
    def index_version(self) -> str:
        """Content hash of the serialized bundle; identical to the saved manifest's."""
        if "index_version" not in self.manifest:
            self.manifest = {**self.manifest, "index_version": _content_version(_serialize(self))}
        return self.manifest["index_version"]

    def surfaces_of(self, resource: str) -> List[str]:
        return self._resource_surfaces.get(resource, [])

    def _hits_for(self, sid: int, score: float) -> List[ScoredSurfaceHit]:
        key = self.surfaces[sid]
        return [
            ScoredSurfaceHit(iri, key, score, principal, self.popularity.get(iri))
            for iri, principal, _ in self.postings[sid]
        ]

    def search_surface(
        self,
        text: str,
        sigma: float,
        require_principal_exact: bool = True,
        limit: Optional[int] = None,
    ) -> List[ScoredSurfaceHit]:
        """Exact principal-reference match, else all surfaces with trigram similarity >= sigma.

        Hits are ordered by score (desc), IRI, surface; numeric-only surfaces
        never match.
        """
        if not 0.0 <= sigma <= 1.0:
            raise ValueError("sigma must lie in [0, 1]")
        key = surface_key(text)
        if require_principal_exact and key in self._principal and not is_numeric(key):
            sid = self._surface_id[key]
            hits = [h for h in self._hits_for(sid, 1.0) if h.is_principal]
            return sorted(hits, key=lambda h: h.resource)[:limit]

        query = trigram_set(key)
        if sigma <= 0.0:
            candidates: Iterable[int] = range(len(self.surfaces))
        else:
            if not query:
                return []
            # a match needs |shared| >= sigma*|query|, so it must share one of
            # the len(query) - min_shared + 1 rarest query trigrams
            min_shared = max(1, math.ceil(sigma * len(query) - 1e-9))
            by_rarity = sorted(query, key=lambda t: (len(self.trigrams.get(t, ())), t))
            candidates = set()
            for tri in by_rarity[: len(query) - min_shared + 1]:
                candidates.update(self.trigrams.get(tri, ()))
        hits: List[ScoredSurfaceHit] = []
        for sid in candidates:
            surface = self.surfaces[sid]
            if is_numeric(surface):
                continue
            score = jaccard(query, trigram_set(surface))
            if score >= sigma:
                hits.extend(self._hits_for(sid, score))
        hits.sort(key=lambda h: (-h.trigram_score, h.resource, h.surface))
        return hits[:limit] if limit is not None else hits

    def search_acronym(self, acronym: str) -> List[str]:
        return list(self.acronyms.get(acronym, ()))

    def search_context(self, query: ContextQuery, top_k: int) -> List[Tuple[str, float]]:
        """TF-IDF ranking of context documents sharing at least one query term."""
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        terms = query.terms()
        scores: Dict[str, float] = {}
        for term in sorted(terms):
            postings = self._context_postings.get(term)
            if not postings:
                continue
            weight = terms[term] * self._idf[term]
            for iri, tf in postings:
                scores[iri] = scores.get(iri, 0.0) + weight * tf
        ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked[:top_k]

    # -- persistence -------------------------------------------------------

    def save(self, directory) -> None:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        files = _serialize(self)
        manifest = dict(self.manifest)
        manifest["index_version"] = _content_version(files)
        self.manifest = manifest
        for name, content in files.items():
            (out / name).write_text(content, encoding="utf-8")
        (out / "manifest.json").write_text(_dumps_manifest(manifest), encoding="utf-8")

    @classmethod
    def load(cls, directory) -> "IndexBundle":
        src = Path(directory)
        manifest_path = src / "manifest.json"
        if not manifest_path.is_file():
            raise BundleError(f"{src} is not an index directory (no manifest.json)")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        if manifest.get("format_version") != FORMAT_VERSION:
            raise BundleError(f"unsupported index format {manifest.get('format_version')!r}")

        def rows(name):
            with open(src / name, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        yield json.loads(line)

        surfaces, postings = [], []
        for key, plist in rows("surfaces.jsonl"):
            surfaces.append(key)
            postings.append(tuple((iri, bool(p), s) for iri, p, s in plist))
        trigrams = {tri: tuple(ids) for tri, ids in rows("trigrams.jsonl")}
        context = {iri: Counter(bag) for iri, bag in rows("context.jsonl")}
        popularity = PopularityTable(
            {iri: score for iri, score in rows("popularity.jsonl")},
            PopularityMethod(manifest["popularity_method"]),
        )
        succ = {iri: targets for iri, targets in rows("graph.jsonl")}
        graph = KbGraph.from_edges(succ.keys(), ((a, b) for a, bs in succ.items() for b in bs))
        types = {iri: tuple(ts) for iri, ts in rows("types.jsonl")}
        acronyms = read_acronym_file(src / "acronyms.tsv")
        return cls(surfaces, postings, trigrams, context, acronyms, popularity, graph, types, manifest)

    def dump_debug(self) -> str:
        """Canonical plain-text rendering of the whole bundle."""
        files = _serialize(self)
        parts = ["# manifest", _dumps_manifest(self.manifest)]
        for name in sorted(files):
            parts.append(f"# {name}")
            parts.append(files[name])
        return "\n".join(parts)


def direct_link_count(resource: str, others: Iterable[str], graph: KbGraph) -> int:
    """Number of distinct ``others`` joined to ``resource`` by an edge in either direction."""
    return sum(
        1
        for o in set(others)
        if o != resource and (graph.has_edge(resource, o) or graph.has_edge(o, resource))
    )


def _jsonl(rows: Iterable) -> str:
    return "".join(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n" for r in rows)


def _serialize(bundle: IndexBundle) -> Dict[str, str]:
    acr_lines = "".join(
        f"{k}\t{e}\n" for k in sorted(bundle.acronyms) for e in bundle.acronyms[k]
    )
    return {
        "surfaces.jsonl": _jsonl(
            [key, [[iri, p, s] for iri, p, s in plist]]
            for key, plist in zip(bundle.surfaces, bundle.postings)
        ),
        "trigrams.jsonl": _jsonl([t, list(bundle.trigrams[t])] for t in sorted(bundle.trigrams)),
        "context.jsonl": _jsonl(
            [iri, dict(sorted(bundle.context_docs[iri].items()))] for iri in sorted(bundle.context_docs)
        ),
        "acronyms.tsv": acr_lines,
        "popularity.jsonl": _jsonl([iri, bundle.popularity.scores[iri]] for iri in sorted(bundle.popularity.scores)),
        "graph.jsonl": _jsonl([n, list(bundle.graph.successors(n))] for n in sorted(bundle.graph.nodes)),
        "types.jsonl": _jsonl([iri, list(bundle.types[iri])] for iri in sorted(bundle.types)),
    }


def _dumps_manifest(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _content_version(files: Mapping[str, str]) -> str:
    h = hashlib.sha256()
    for name in sorted(files):
        h.update(name.encode())
        h.update(b"\0")
        h.update(files[name].encode("utf-8"))
    return f"v{FORMAT_VERSION}-{h.hexdigest()[:16]}"


def build_index(
    triples: Iterable[Triple],
    config: IngestConfig,
    acronyms: Optional[Mapping[str, Sequence[str]]] = None,
    popularity_method: PopularityMethod = PopularityMethod.PAGERANK,
    tagger=None,
) -> IndexBundle:
    extract = collect(triples, config)
    if extract.triple_count == 0:
        raise BundleError("no triples ingested")
    return bundle_from_extract(extract, config, acronyms or {}, popularity_method, tagger)


def bundle_from_extract(
    extract: KbExtract,
    config: IngestConfig,
    acronyms: Mapping[str, Sequence[str]],
    popularity_method: PopularityMethod,
    tagger=None,
) -> IndexBundle:
    records: List[SurfaceFormRecord] = surface_records(extract, config, tagger)
    by_key: Dict[str, Dict[str, Tuple[bool, str]]] = {}
    for rec in records:
        key = surface_key(rec.surface)
        if not key:
            continue
        slot = by_key.setdefault(key, {})
        prev = slot.get(rec.resource)
        if prev is None:
            slot[rec.resource] = (rec.is_principal, rec.source.value)
        elif rec.is_principal and not prev[0]:
            slot[rec.resource] = (True, prev[1])
    surfaces = sorted(by_key)
    postings = [
        tuple((iri, p, s) for iri, (p, s) in sorted(by_key[key].items())) for key in surfaces
    ]
    trigram_lists: Dict[str, List[int]] = {}
    for sid, key in enumerate(surfaces):
        for tri in trigram_set(key):
            trigram_lists.setdefault(tri, []).append(sid)
    trigrams = {t: tuple(ids) for t, ids in trigram_lists.items()}
    popularity = compute_popularity(extract.graph, popularity_method)
    types = {r: tuple(sorted(t)) for r, t in extract.types.items()}
    acr = {k: list(v) for k, v in acronyms.items()}
    manifest = {
        "format_version": FORMAT_VERSION,
        "kb_name": config.kb_name,
        "language": config.language,
        "ingest_config": asdict(config),
        "popularity_method": PopularityMethod(popularity_method).value,
        "tfidf_scheme": TFIDF_SCHEME,
        "trigram_scheme": TRIGRAM_SCHEME,
        "counts": {
            "triples": extract.triple_count,
            "resources": len(extract.graph.nodes),
            "edges": extract.graph.edge_count,
            "labelled_resources": len(extract.labels),
            "surface_records": len(records),
            "surfaces": len(surfaces),
            "context_docs": len(extract.context),
            "acronyms": len(acr),
            "acronym_expansions": sum(len(v) for v in acr.values()),
            "typed_resources": len(types),
        },
    }
    return IndexBundle(surfaces, postings, trigrams, dict(extract.context), acr, popularity, extract.graph, types, manifest)


def build_index_from_files(
    paths: Sequence,
    config: IngestConfig,
    acronym_file=None,
    popularity_method: PopularityMethod = PopularityMethod.PAGERANK,
    strict: bool = False,
) -> Tuple[IndexBundle, ParseStats]:
    stats = ParseStats()
    acronyms = read_acronym_file(acronym_file) if acronym_file else {}
    bundle = build_index(read_ntriples_files(paths, strict=strict, stats=stats), config, acronyms, popularity_method)
    bundle.manifest["counts"]["skipped_lines"] = stats.skipped
    bundle.manifest["sources"] = sorted(Path(p).name for p in paths)
    return bundle, stats

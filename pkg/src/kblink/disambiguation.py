"""Graph-based disambiguation over the candidates of one document."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple
from urllib.parse import quote

from .candidates import Candidate, Mention
from .config import Algorithm, LinkerConfig
from .kbgraph import KbGraph
from .ranking import hits, pagerank
from .text import is_acronym, normalize


@dataclass
class NodeScore:
    authority: float = 0.0
    hub: float = 0.0
    pagerank: float = 0.0


@dataclass
class DisambiguationGraph:
    nodes: Set[str]
    edges: Set[Tuple[str, str]]
    candidate_of: Dict[Mention, List[str]]
    scores: Dict[str, NodeScore] = field(default_factory=dict)

    def indexed_edges(self) -> Tuple[List[str], List[int], List[int]]:
        order = sorted(self.nodes)
        pos = {n: i for i, n in enumerate(order)}
        src, dst = [], []
        for a, b in sorted(self.edges):
            src.append(pos[a])
            dst.append(pos[b])
        return order, src, dst

    def dump(self) -> str:
        """Text export: nodes with scores, edges, per-mention candidate ranks."""
        lines = [f"nodes {len(self.nodes)}"]
        for n in sorted(self.nodes):
            s = self.scores.get(n, NodeScore())
            lines.append(f"node\t{n}\t{s.authority!r}\t{s.hub!r}\t{s.pagerank!r}")
        lines.append(f"edges {len(self.edges)}")
        lines.extend(f"edge\t{a}\t{b}" for a, b in sorted(self.edges))
        for m in sorted(self.candidate_of):
            lines.append(f"mention\t{m.start}\t{m.end}\t{m.text}")
            for rank, iri in enumerate(self.candidate_of[m], 1):
                lines.append(f"  {rank}\t{iri}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Assignment:
    mention: Mention
    iri: str
    emergent: bool
    score: float = 0.0


def build_initial_graph(candidates_per_mention: Mapping[Mention, Sequence]) -> DisambiguationGraph:
    candidate_of = {
        m: [c.resource if isinstance(c, Candidate) else str(c) for c in cands]
        for m, cands in candidates_per_mention.items()
    }
    nodes = {iri for cands in candidate_of.values() for iri in cands}
    return DisambiguationGraph(nodes, set(), candidate_of)


def bfs_expand(graph: DisambiguationGraph, kb: KbGraph, depth: int) -> DisambiguationGraph:
    """Apply the out-neighbour expansion ``depth`` times, then add every KB
    edge whose endpoints are both present."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    nodes = set(graph.nodes)
    edges = set(graph.edges)
    if depth == 0:
        return DisambiguationGraph(nodes, edges, dict(graph.candidate_of), dict(graph.scores))
    # nodes expanded in an earlier round contribute nothing new later on
    frontier = set(nodes)
    for _ in range(depth):
        added = set()
        for v in frontier:
            for w in kb.successors(v):
                edges.add((v, w))
                if w not in nodes:
                    added.add(w)
        nodes |= added
        frontier = added
    for v in nodes:
        for w in kb.successors(v):
            if w in nodes:
                edges.add((v, w))
    return DisambiguationGraph(nodes, edges, dict(graph.candidate_of))


def hits_score(graph: DisambiguationGraph, iterations: int = 20, callback=None) -> Dict[str, NodeScore]:
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    order, src, dst = graph.indexed_edges()
    auth, hub = hits(len(order), src, dst, iterations, callback)
    scores = {n: NodeScore(authority=float(a), hub=float(h)) for n, a, h in zip(order, auth, hub)}
    graph.scores = scores
    return scores


def pagerank_score(
    graph: DisambiguationGraph, iterations: int = 50, alpha: float = 0.15, callback=None
) -> Dict[str, NodeScore]:
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    order, src, dst = graph.indexed_edges()
    pr = pagerank(len(order), src, dst, alpha=alpha, iterations=iterations, callback=callback)
    scores = {n: NodeScore(pagerank=float(p)) for n, p in zip(order, pr)}
    graph.scores = scores
    return scores


def emergent_iri(mention: Mention, namespace: str) -> str:
    text = mention.text.strip()
    slug = text if is_acronym(text) else "_".join(normalize(text).split())
    return namespace + quote(slug or "_", safe="")


def _score_of(score: NodeScore, algorithm: Algorithm) -> float:
    return score.authority if algorithm is Algorithm.HITS else score.pagerank


def select_assignments(
    graph: DisambiguationGraph,
    mentions: Sequence[Mention],
    algorithm: Algorithm = Algorithm.HITS,
    namespace: str = LinkerConfig.emergent_namespace,
) -> List[Assignment]:
    """Highest-ranked candidate per mention; emergent IRI when there is none."""
    algorithm = Algorithm(algorithm)
    ranked = sorted(
        graph.nodes, key=lambda n: (-_score_of(graph.scores.get(n, NodeScore()), algorithm), n)
    )
    rank = {n: i for i, n in enumerate(ranked)}
    out = []
    for m in mentions:
        cands = graph.candidate_of.get(m) or []
        if not cands:
            out.append(Assignment(m, emergent_iri(m, namespace), True, 0.0))
            continue
        best = min(cands, key=rank.__getitem__)
        out.append(Assignment(m, best, False, _score_of(graph.scores.get(best, NodeScore()), algorithm)))
    return out


def disambiguate(
    candidates_per_mention: Mapping[Mention, Sequence[Candidate]],
    kb: KbGraph,
    config: LinkerConfig,
    mentions: Optional[Sequence[Mention]] = None,
) -> Tuple[DisambiguationGraph, List[Assignment]]:
    graph = bfs_expand(build_initial_graph(candidates_per_mention), kb, config.depth)
    if graph.nodes:
        if config.algorithm is Algorithm.HITS:
            hits_score(graph, config.hits_iterations)
        else:
            pagerank_score(graph, config.pagerank_iterations, config.pagerank_alpha)
    order = list(mentions) if mentions is not None else list(candidates_per_mention)
    return graph, select_assignments(graph, order, config.algorithm, config.emergent_namespace)

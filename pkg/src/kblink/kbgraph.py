"""The directed resource graph of a knowledge base and KB-wide popularity."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Tuple

from .ranking import EmptyGraph, pagerank
from .rdf import Literal, Triple


@dataclass(frozen=True)
class KbGraph:
    """Set-based graph: one edge per (subject, resource object) pair, no self-loops."""

    nodes: FrozenSet[str]
    out_edges: Mapping[str, Tuple[str, ...]]
    in_edges: Mapping[str, Tuple[str, ...]]
    _out_sets: Dict[str, FrozenSet[str]] = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_edges(cls, nodes: Iterable[str], edges: Iterable[Tuple[str, str]]) -> "KbGraph":
        nodes = set(nodes)
        out: Dict[str, set] = {}
        inn: Dict[str, set] = {}
        for a, b in edges:
            if a == b:
                continue
            nodes.add(a)
            nodes.add(b)
            out.setdefault(a, set()).add(b)
            inn.setdefault(b, set()).add(a)
        return cls(
            frozenset(nodes),
            {k: tuple(sorted(v)) for k, v in sorted(out.items())},
            {k: tuple(sorted(v)) for k, v in sorted(inn.items())},
            {k: frozenset(v) for k, v in out.items()},
        )

    def successors(self, node: str) -> Tuple[str, ...]:
        return self.out_edges.get(node, ())

    def predecessors(self, node: str) -> Tuple[str, ...]:
        return self.in_edges.get(node, ())

    def has_edge(self, a: str, b: str) -> bool:
        targets = self._out_sets.get(a)
        return targets is not None and b in targets

    def edges(self) -> Iterable[Tuple[str, str]]:
        for a, targets in self.out_edges.items():
            for b in targets:
                yield a, b

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self.out_edges.values())

    def out_degree(self, node: str) -> int:
        return len(self.out_edges.get(node, ()))

    def in_degree(self, node: str) -> int:
        return len(self.in_edges.get(node, ()))


def build_kb_graph(triples: Iterable[Triple]) -> KbGraph:
    nodes = set()
    edges = set()
    for s, _, o in triples:
        nodes.add(s)
        if not isinstance(o, Literal):
            nodes.add(o)
            edges.add((s, o))
    return KbGraph.from_edges((str(n) for n in nodes), ((str(a), str(b)) for a, b in edges))


class PopularityMethod(str, enum.Enum):
    PAGERANK = "pagerank"
    DEGREE_HEURISTIC = "degree"


@dataclass(frozen=True)
class PopularityTable:
    scores: Mapping[str, float]
    method: PopularityMethod

    def get(self, resource: str) -> float:
        return self.scores.get(resource, 0.0)

    def ranked(self) -> list:
        """Resources by descending score, ties by ascending IRI."""
        return sorted(self.scores, key=lambda r: (-self.scores[r], r))


def compute_popularity(
    graph: KbGraph,
    method: PopularityMethod = PopularityMethod.PAGERANK,
    damping: float = 0.85,
    max_iterations: int = 50,
    tol: float = 1e-8,
) -> PopularityTable:
    if not graph.nodes:
        raise EmptyGraph("cannot compute popularity of an empty KB graph")
    order = sorted(graph.nodes)
    method = PopularityMethod(method)
    if method is PopularityMethod.DEGREE_HEURISTIC:
        degrees = [graph.in_degree(r) + graph.out_degree(r) for r in order]
        total = sum(degrees)
        if total == 0:
            return PopularityTable({r: 1.0 / len(order) for r in order}, method)
        return PopularityTable({r: d / total for r, d in zip(order, degrees)}, method)

    pos = {r: i for i, r in enumerate(order)}
    src, dst = [], []
    for a, b in graph.edges():
        src.append(pos[a])
        dst.append(pos[b])
    pr = pagerank(len(order), src, dst, alpha=1.0 - damping, iterations=max_iterations, tol=tol)
    return PopularityTable({r: float(v) for r, v in zip(order, pr)}, method)

"""Planarity testing with rotation-system output.

The left-right test itself is delegated to networkx; every embedding it
returns is re-validated here by face tracing against Euler's formula.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import networkx as nx

from .graph import Graph

# A rotation system: vertex -> neighbours in clockwise order.  On the
# simple underlying graph a neighbour id identifies the incident edge.
Embedding = Mapping[int, tuple[int, ...]]


@dataclass(frozen=True)
class KuratowskiWitness:
    kind: str  # "edge-bound", "K5" or "K3,3"
    edges: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class PlanarityResult:
    planar: bool
    embedding: Embedding | None = None
    witness: KuratowskiWitness | None = None

    def __bool__(self) -> bool:
        return self.planar


def to_networkx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(g.weights)
    h.add_edges_from(g.simple_edges())
    return h


def is_planar(g: Graph) -> PlanarityResult:
    """Test the simple undirected underlying graph of ``g`` for planarity."""
    n = len(g)
    edges = g.simple_edges()
    if n >= 3 and len(edges) > 3 * n - 6:
        return PlanarityResult(False, witness=KuratowskiWitness("edge-bound"))
    planar, cert = nx.check_planarity(to_networkx(g), counterexample=True)
    if not planar:
        return PlanarityResult(False, witness=_classify(cert))
    emb = {v: tuple(cert.neighbors_cw_order(v)) for v in g.weights}
    if not euler_valid(emb):
        raise AssertionError("planarity backend returned an invalid rotation system")
    return PlanarityResult(True, embedding=emb)


def _classify(sub: nx.Graph) -> KuratowskiWitness:
    branch = [v for v, d in sub.degree() if d >= 3]
    kind = "K5" if len(branch) == 5 else "K3,3"
    edges = tuple(sorted((min(u, v), max(u, v)) for u, v in sub.edges()))
    return KuratowskiWitness(kind, edges)


def count_faces(emb: Embedding) -> int:
    """Number of faces traced by the rotation system (isolated vertices
    contribute none)."""
    pos = {v: {u: i for i, u in enumerate(rot)} for v, rot in emb.items()}
    seen: set[tuple[int, int]] = set()
    faces = 0
    for v, rot in emb.items():
        for u in rot:
            if (v, u) in seen:
                continue
            faces += 1
            a, b = v, u
            while (a, b) not in seen:
                seen.add((a, b))
                rb = emb[b]
                a, b = b, rb[(pos[b][a] + 1) % len(rb)]
    return faces


def euler_valid(emb: Embedding) -> bool:
    """Check that ``emb`` is a consistent genus-0 rotation system.

    Every edge must appear at both endpoints and each connected component
    must satisfy V - E + F = 2 (an isolated vertex counts one face).
    """
    for v, rot in emb.items():
        if len(set(rot)) != len(rot) or v in rot:
            return False
        for u in rot:
            if u not in emb or v not in emb[u]:
                return False
    seen: set[int] = set()
    for start in emb:
        if start in seen:
            continue
        comp, stack = {start}, [start]
        while stack:
            x = stack.pop()
            for y in emb[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        sub = {v: emb[v] for v in comp}
        e = sum(len(r) for r in sub.values()) // 2
        f = count_faces(sub) if e else 1
        if len(comp) - e + f != 2:
            return False
    return True


def embedding_of(g: Graph) -> Embedding:
    """Embedding of a planar graph; raises ValueError otherwise."""
    res = is_planar(g)
    if not res.planar:
        raise ValueError("graph is not planar")
    return res.embedding

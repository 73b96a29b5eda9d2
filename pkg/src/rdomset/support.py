"""Support graphs for ball systems.

The dual support contracts the Voronoi cells of the augmented graph with
respect to the ball nodes.  The intersection support applies the same idea
to a red/blue pair of ball families.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .balls import AugmentedGraph, Ball, HitSetTable, build_augmented
from .graph import (
    Graph,
    GraphError,
    contract_cells,
    induced_connected,
    load_json,
    multi_source_voronoi,
    shortest_paths,
)
from .planarity import is_planar

DUAL = "dual"
INTERSECTION = "intersection"
DIRECTED_PIPELINE = "directed-pipeline"
UNDIRECTED_SHORTCUT = "undirected-shortcut"


@dataclass(frozen=True)
class SupportGraph:
    kind: str
    nodes: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    witness: Mapping[int, int]  # host vertex -> ball id
    host: Graph | None = None
    stats: Mapping[str, object] = field(default_factory=dict)

    def as_graph(self) -> Graph:
        return Graph.build(self.nodes, [(a, b, 1) for a, b in sorted(self.edges)])

    def neighbors(self, ball_id: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == ball_id:
                out.add(b)
            elif b == ball_id:
                out.add(a)
        return out

    def cells(self) -> dict[int, set[int]]:
        out: dict[int, set[int]] = {b: set() for b in self.nodes}
        for v, b in self.witness.items():
            out.setdefault(b, set()).add(v)
        return out

    def to_document(self, planar: bool | None = None) -> dict:
        if planar is None:
            planar = self.stats.get("planar")
            if planar is None:
                planar = is_planar(self.as_graph()).planar
        return {
            "kind": self.kind,
            "nodes": list(self.nodes),
            "edges": [list(e) for e in sorted(self.edges)],
            "cells": {str(v): b for v, b in sorted(self.witness.items())},
            "planar": planar,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2)


def parse_support(text: str | Mapping) -> SupportGraph:
    doc = load_json(text) if isinstance(text, str) else text
    try:
        return SupportGraph(
            kind=doc["kind"],
            nodes=tuple(doc["nodes"]),
            edges=frozenset((min(a, b), max(a, b)) for a, b in doc["edges"]),
            witness={int(v): b for v, b in doc["cells"].items()},
            stats={"planar": doc["planar"]},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed support document: {exc}") from exc


@dataclass
class SupportReport:
    passed: bool
    failures: list[tuple[object, tuple]] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed


def _report(failures, **stats) -> SupportReport:
    return SupportReport(not failures, failures, stats)


def _undirected(h: Graph) -> frozenset[tuple[int, int]]:
    return frozenset(h.simple_edges())


# ---------------------------------------------------------------------------
# Dual support
# ---------------------------------------------------------------------------


def dual_support_of(aug: AugmentedGraph) -> SupportGraph:
    sources = [(x, 0, bid) for bid, x in aug.node_of.items()]
    labels = multi_source_voronoi(aug.graph, sources)
    witness = dict(labels.owner)
    h = contract_cells(aug.graph, witness)
    return SupportGraph(DUAL, tuple(aug.balls), _undirected(h), witness, host=aug.graph)


def build_dual_support(g: Graph, balls: Sequence[Ball]) -> SupportGraph:
    """Contract the Voronoi cells of the augmented graph into a support."""
    return dual_support_of(build_augmented(g, balls))


def verify_dual_support(s: SupportGraph, hits: HitSetTable) -> SupportReport:
    """Every hit set of size >= 2 must induce a connected subgraph of ``s``."""
    sg = s.as_graph()
    failures = [(v, tuple(h)) for v, h in hits.items() if len(h) >= 2 and not induced_connected(sg, h)]
    return _report(failures, nodes=len(s.nodes), edges=len(s.edges), checked=len(hits))


# ---------------------------------------------------------------------------
# Intersection support
# ---------------------------------------------------------------------------


def build_intersection_support(
    g: Graph,
    red: Sequence[Ball],
    blue: Sequence[Ball],
    mode: str = DIRECTED_PIPELINE,
) -> SupportGraph:
    """Support on the red balls in which, for every blue ball, the red balls
    meeting it induce a connected subgraph."""
    if not red:
        raise GraphError("empty red ball list")
    ids = [b.id for b in red] + [b.id for b in blue]
    if len(set(ids)) != len(ids):
        raise GraphError("red and blue ball ids must be distinct")
    if mode == UNDIRECTED_SHORTCUT:
        if g.directed:
            raise GraphError("undirected-shortcut mode requires an undirected graph")
        return _shortcut_support(g, red, blue)
    if mode != DIRECTED_PIPELINE:
        raise GraphError(f"unknown mode {mode!r}")
    return _pipeline_support(g, red, blue)


def _pipeline_support(g: Graph, red: Sequence[Ball], blue: Sequence[Ball]) -> SupportGraph:
    aug = build_augmented(g, list(red) + list(blue))
    gp = aug.graph
    red_ids = sorted(b.id for b in red)
    red_nodes = {aug.node_of[r]: r for r in red_ids}
    labels = multi_source_voronoi(gp, [(aug.node_of[r], 0, r) for r in red_ids], cutoff=aug.rmax)
    # red cells collapse onto their ball node; blue vertices stay singletons
    first = {v: (aug.node_of[labels.owner[v]] if v in labels.owner else v) for v in gp.weights}
    h = contract_cells(gp, first)
    sentinel = 1 + gp.total_length()
    h = Graph(
        h.directed,
        h.weights,
        tuple(
            sorted((u, v, sentinel if u in red_nodes and v in red_nodes else length) for u, v, length in h.arcs)
        ),
    )
    hr = h.reversed()
    second = multi_source_voronoi(hr, [(x, 0, r) for x, r in red_nodes.items()])
    traversed = any(
        hr.arcs[a][2] >= sentinel for a in second.parent.values() if a is not None
    )
    final = contract_cells(hr, second.owner)
    witness = {v: second.owner[c] for v, c in first.items() if c in second.owner}
    return SupportGraph(
        INTERSECTION,
        tuple(red_ids),
        _undirected(final),
        witness,
        host=gp,
        stats={"mode": DIRECTED_PIPELINE, "sentinel_traversed": traversed, "dropped": len(first) - len(witness)},
    )


def _shortcut_support(g: Graph, red: Sequence[Ball], blue: Sequence[Ball]) -> SupportGraph:
    aug = build_augmented(g, list(red) + list(blue), two_way=[b.id for b in blue])
    red_ids = sorted(b.id for b in red)
    labels = multi_source_voronoi(
        aug.graph, [(aug.node_of[r], 0, r) for r in red_ids], cutoff=2 * aug.rmax
    )
    witness = dict(labels.owner)
    h = contract_cells(aug.graph, witness)
    return SupportGraph(
        INTERSECTION, tuple(red_ids), _undirected(h), witness, host=aug.graph,
        stats={"mode": UNDIRECTED_SHORTCUT},
    )


def intersecting_reds(g: Graph, red: Sequence[Ball], blue: Sequence[Ball]) -> dict[int, tuple[int, ...]]:
    """blue id -> ids of red balls sharing at least one vertex of ``g``."""
    members = {b.id: set(shortest_paths(g, b.center, cutoff=b.radius).owner) for b in list(red) + list(blue)}
    return {
        b.id: tuple(sorted(r.id for r in red if members[r.id] & members[b.id]))
        for b in blue
    }


def verify_intersection_support(
    s: SupportGraph, red: Sequence[Ball], blue: Sequence[Ball], g: Graph
) -> SupportReport:
    sg = s.as_graph()
    failures = []
    for bid, reds in intersecting_reds(g, red, blue).items():
        if len(reds) >= 2 and not induced_connected(sg, reds):
            failures.append((bid, reds))
    return _report(failures, nodes=len(s.nodes), edges=len(s.edges), checked=len(blue))


# ---------------------------------------------------------------------------
# Minor witness
# ---------------------------------------------------------------------------


def verify_minor_preservation(g: Graph, s: SupportGraph) -> SupportReport:
    """Check that ``s`` is a contraction minor of its host via its witness
    partition, and that planarity of ``g`` carries over to ``s``."""
    host = s.host if s.host is not None else g
    failures = []
    cells = s.cells()
    for b in s.nodes:
        members = cells.get(b, set())
        if not members:
            failures.append(("empty-cell", (b,)))
        elif not induced_connected(host, members):
            failures.append(("disconnected-cell", (b,)))
    stray = sorted(set(cells) - set(s.nodes))
    if stray:
        failures.append(("unknown-cell", tuple(stray)))
    realised = set()
    for u, v, _ in host.arcs:
        cu, cv = s.witness.get(u), s.witness.get(v)
        if cu is not None and cv is not None and cu != cv:
            realised.add((min(cu, cv), max(cu, cv)))
    for e in sorted(s.edges):
        if e not in realised:
            failures.append(("unrealised-edge", e))
    host_planar = is_planar(g).planar
    support_planar = is_planar(s.as_graph()).planar
    if host_planar and not support_planar:
        failures.append(("planarity-lost", ()))
    return _report(
        failures,
        nodes=len(s.nodes),
        edges=len(s.edges),
        host_planar=host_planar,
        planar=support_planar,
    )

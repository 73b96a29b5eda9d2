"""Weighted digraphs, multi-source Voronoi labelling and cell contraction.

Vertex ids are non-negative ints, arc lengths are non-negative ints and
vertex weights are :class:`fractions.Fraction`.  Undirected graphs are
stored as pairs of opposite arcs with equal length.
"""
from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

INF = None  # unreachable marker in VoronoiLabels.dist


class GraphError(ValueError):
    """Raised for malformed graph documents or invalid graph operations."""


class DisconnectedCellError(GraphError):
    def __init__(self, cell):
        super().__init__(f"cell {cell!r} does not induce a connected subgraph")
        self.cell = cell


Arc = tuple[int, int, int]


@dataclass(frozen=True)
class Graph:
    """Immutable weighted digraph.

    ``weights`` maps every vertex id to its weight (ordered by id) and
    ``arcs`` holds ``(tail, head, length)`` triples sorted lexicographically.
    """

    directed: bool
    weights: Mapping[int, Fraction]
    arcs: tuple[Arc, ...]

    @classmethod
    def build(
        cls,
        vertices: Iterable[int] | Mapping[int, object],
        edges: Iterable[tuple[int, int, int]],
        directed: bool = False,
    ) -> "Graph":
        """Validate and normalise vertices/edges into a Graph.

        ``vertices`` is either an iterable of ids (weight 1) or a mapping
        id -> weight.  For undirected graphs each edge yields both arcs.
        """
        if isinstance(vertices, Mapping):
            items = list(vertices.items())
        else:
            items = [(v, 1) for v in vertices]
        weights: dict[int, Fraction] = {}
        for i, (v, w) in enumerate(items):
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise GraphError(f"vertices[{i}]: id must be a non-negative integer, got {v!r}")
            if v in weights:
                raise GraphError(f"vertices[{i}]: duplicate id {v}")
            w = Fraction(w)
            if w < 0:
                raise GraphError(f"vertices[{i}]: negative weight {w}")
            weights[v] = w
        arcs: list[Arc] = []
        for i, (u, v, length) in enumerate(edges):
            if u not in weights or v not in weights:
                raise GraphError(f"edges[{i}]: unknown endpoint in ({u}, {v})")
            if not isinstance(length, int) or isinstance(length, bool):
                raise GraphError(f"edges[{i}]: length must be an integer, got {length!r}")
            if length < 0:
                raise GraphError(f"edges[{i}]: negative length {length}")
            arcs.append((u, v, length))
            if not directed:
                arcs.append((v, u, length))
        return cls(
            directed=directed,
            weights={v: weights[v] for v in sorted(weights)},
            arcs=tuple(sorted(arcs)),
        )

    @property
    def vertices(self) -> list[int]:
        return list(self.weights)

    def __len__(self) -> int:
        return len(self.weights)

    def __contains__(self, v) -> bool:
        return v in self.weights

    @cached_property
    def out_adj(self) -> dict[int, list[tuple[int, int, int]]]:
        """vertex -> [(head, length, arc index)] in arc order."""
        adj: dict[int, list[tuple[int, int, int]]] = {v: [] for v in self.weights}
        for i, (u, v, length) in enumerate(self.arcs):
            adj[u].append((v, length, i))
        return adj

    @cached_property
    def undirected_adj(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.weights}
        for u, v, _ in self.arcs:
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return adj

    def edges(self) -> list[tuple[int, int, int]]:
        """Edge records as they appear in the JSON document."""
        if self.directed:
            return list(self.arcs)
        # every undirected edge is an arc pair; keep the u <= v half and
        # halve the multiplicity of loops, which were stored twice
        out = []
        loops: dict[Arc, int] = {}
        for a in self.arcs:
            u, v, _ = a
            if u < v:
                out.append(a)
            elif u == v:
                loops[a] = loops.get(a, 0) + 1
        for a, count in loops.items():
            out.extend([a] * (count // 2))
        return sorted(out)

    def simple_edges(self) -> set[tuple[int, int]]:
        """Edges of the simple undirected underlying graph as (min, max)."""
        return {(min(u, v), max(u, v)) for u, v, _ in self.arcs if u != v}

    def reversed(self) -> "Graph":
        return Graph(self.directed, self.weights, tuple(sorted((v, u, l) for u, v, l in self.arcs)))

    def induced(self, keep: Iterable[int]) -> "Graph":
        keep = set(keep)
        return Graph(
            self.directed,
            {v: w for v, w in self.weights.items() if v in keep},
            tuple(a for a in self.arcs if a[0] in keep and a[1] in keep),
        )

    def total_length(self) -> int:
        return sum(length for _, _, length in self.arcs)

    # -- serialisation ---------------------------------------------------

    def to_document(self) -> dict:
        return {
            "directed": self.directed,
            "vertices": [{"id": v, "weight": _number(w)} for v, w in self.weights.items()],
            "edges": [{"u": u, "v": v, "len": length} for u, v, length in self.edges()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2)


def _number(x: Fraction):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else float(x)


def load_json(text: str):
    """json.loads keeping decimal numbers exact."""
    return json.loads(text, parse_float=Fraction)


def parse_graph(text: str | Mapping) -> Graph:
    """Parse a graph document (JSON text or an already decoded object)."""
    try:
        doc = load_json(text) if isinstance(text, str) else text
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, Mapping):
        raise GraphError("graph document must be an object")
    for key in ("directed", "vertices", "edges"):
        if key not in doc:
            raise GraphError(f"missing key {key!r}")
    if not isinstance(doc["directed"], bool):
        raise GraphError("'directed' must be a boolean")
    vertices = []
    for i, rec in enumerate(doc["vertices"]):
        if not isinstance(rec, Mapping) or "id" not in rec:
            raise GraphError(f"vertices[{i}]: expected an object with 'id'")
        w = rec.get("weight", 1)
        if isinstance(w, bool) or not isinstance(w, (int, Fraction)):
            raise GraphError(f"vertices[{i}]: weight must be a number")
        vertices.append((rec["id"], w))
    seen = set()
    for i, (v, _) in enumerate(vertices):
        if v in seen:
            raise GraphError(f"vertices[{i}]: duplicate id {v}")
        seen.add(v)
    edges = []
    for i, rec in enumerate(doc["edges"]):
        if not isinstance(rec, Mapping) or not {"u", "v", "len"} <= set(rec):
            raise GraphError(f"edges[{i}]: expected an object with 'u', 'v', 'len'")
        edges.append((rec["u"], rec["v"], rec["len"]))
    return Graph.build(dict(vertices), edges, directed=doc["directed"])


# ---------------------------------------------------------------------------
# Shortest paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VoronoiLabels:
    """Per-vertex (dist, owner, parent arc); unreachable vertices are absent
    from ``owner`` and have ``dist`` equal to ``INF``."""

    dist: Mapping[int, int | None]
    owner: Mapping[int, Hashable]
    parent: Mapping[int, int | None]
    graph: Graph

    def reached(self, v: int) -> bool:
        return v in self.owner

    def path(self, v: int) -> list[int]:
        """Vertices from the owning source to ``v`` along parent arcs."""
        if v not in self.owner:
            raise GraphError(f"vertex {v} is unreachable")
        out = [v]
        arcs = self.graph.arcs
        while self.parent[v] is not None:
            v = arcs[self.parent[v]][0]
            out.append(v)
        out.reverse()
        return out

    def parent_vertex(self, v: int) -> int | None:
        a = self.parent.get(v)
        return None if a is None else self.graph.arcs[a][0]

    def cells(self) -> dict[Hashable, set[int]]:
        out: dict[Hashable, set[int]] = {}
        for v, s in self.owner.items():
            out.setdefault(s, set()).add(v)
        return out


def multi_source_voronoi(
    g: Graph,
    sources: Sequence[tuple[int, int, Hashable]],
    cutoff: int | None = None,
) -> VoronoiLabels:
    """Label every reachable vertex with its lexicographically smallest
    ``(distance, source id)`` pair.

    ``sources`` holds ``(vertex, offset, source_id)`` triples.  Ties in
    distance go to the smaller source id, so ownership is always unique.
    With ``cutoff`` set, vertices farther than ``cutoff`` stay unlabelled.
    """
    seen_ids = set()
    best: dict[int, tuple[int, Hashable]] = {}
    parent: dict[int, int | None] = {}
    heap: list[tuple[int, Hashable, int]] = []
    for v, offset, sid in sources:
        if v not in g.weights:
            raise GraphError(f"source vertex {v} not in graph")
        if offset < 0:
            raise GraphError(f"negative offset for source {sid!r}")
        if sid in seen_ids:
            raise GraphError(f"duplicate source id {sid!r}")
        seen_ids.add(sid)
        if cutoff is not None and offset > cutoff:
            continue
        key = (offset, sid)
        if v not in best or key < best[v]:
            best[v] = key
            parent[v] = None
            heapq.heappush(heap, (offset, sid, v))
    done: set[int] = set()
    out_adj = g.out_adj
    while heap:
        d, sid, u = heapq.heappop(heap)
        if u in done or best[u] != (d, sid):
            continue
        done.add(u)
        for v, length, arc in out_adj[u]:
            if v in done:
                continue
            nd = d + length
            if cutoff is not None and nd > cutoff:
                continue
            key = (nd, sid)
            if v not in best or key < best[v]:
                best[v] = key
                parent[v] = arc
                heapq.heappush(heap, (nd, sid, v))
    dist = {v: (best[v][0] if v in best else INF) for v in g.weights}
    owner = {v: best[v][1] for v in g.weights if v in best}
    return VoronoiLabels(dist=dist, owner=owner, parent={v: parent[v] for v in owner}, graph=g)


def shortest_paths(g: Graph, source: int, cutoff: int | None = None) -> VoronoiLabels:
    return multi_source_voronoi(g, [(source, 0, source)], cutoff=cutoff)


# ---------------------------------------------------------------------------
# Contraction and connectivity
# ---------------------------------------------------------------------------


def induced_connected(g: Graph, s: Iterable[int]) -> bool:
    """True iff ``s`` induces a connected subgraph (ignoring arc direction)."""
    s = set(s)
    for v in s:
        if v not in g.weights:
            raise GraphError(f"unknown vertex {v}")
    if len(s) <= 1:
        return True
    adj = g.undirected_adj
    start = next(iter(s))
    stack, seen = [start], {start}
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v in s and v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(s)


def contract_cells(g: Graph, partition: Mapping[int, Hashable]) -> Graph:
    """Contract each cell of ``partition`` (vertex -> cell id) to one vertex.

    Cell ids must be non-negative ints.  The result is simple: loops are
    dropped and parallel arcs keep their minimum length.  Vertices missing
    from the partition are deleted.  Contracted vertex weight is the sum of
    member weights.
    """
    members: dict[Hashable, list[int]] = {}
    for v, c in partition.items():
        if v not in g.weights:
            raise GraphError(f"unknown vertex {v}")
        members.setdefault(c, []).append(v)
    for c in sorted(members):
        if not induced_connected(g, members[c]):
            raise DisconnectedCellError(c)
    lengths: dict[tuple[Hashable, Hashable], int] = {}
    for u, v, length in g.arcs:
        if u not in partition or v not in partition:
            continue
        cu, cv = partition[u], partition[v]
        if cu == cv:
            continue
        if not g.directed and cu > cv:
            cu, cv = cv, cu
        key = (cu, cv)
        if key not in lengths or length < lengths[key]:
            lengths[key] = length
    weights = {c: sum((g.weights[v] for v in vs), Fraction(0)) for c, vs in members.items()}
    edges = [(a, b, length) for (a, b), length in lengths.items()]
    return Graph.build(weights, edges, directed=g.directed)


# ---------------------------------------------------------------------------
# Instance generation
# ---------------------------------------------------------------------------


def gen_planar(seed: int, width: int, height: int, keep_prob: float, max_len: int) -> Graph:
    """Random connected grid subgraph.

    A random spanning tree of the ``width`` x ``height`` grid is always kept;
    every other grid edge survives with probability ``keep_prob``.  Vertex
    ``(row, col)`` gets id ``row * width + col``.
    """
    if width < 1 or height < 1:
        raise GraphError("grid dimensions must be >= 1")
    if not 0 <= keep_prob <= 1:
        raise GraphError("keep_prob must lie in [0, 1]")
    if max_len < 1:
        raise GraphError("max_len must be >= 1")
    rng = random.Random(seed)
    n = width * height
    grid = []
    for r in range(height):
        for c in range(width):
            v = r * width + c
            if c + 1 < width:
                grid.append((v, v + 1))
            if r + 1 < height:
                grid.append((v, v + width))
    order = list(range(len(grid)))
    rng.shuffle(order)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = set()
    for i in order:
        a, b = find(grid[i][0]), find(grid[i][1])
        if a != b:
            parent[a] = b
            tree.add(i)
    edges = []
    for i, (u, v) in enumerate(grid):
        keep = i in tree or rng.random() < keep_prob
        length = rng.randint(1, max_len)
        if keep:
            edges.append((u, v, length))
    weights = {v: rng.randint(1, 100) for v in range(n)}
    return Graph.build(weights, edges)

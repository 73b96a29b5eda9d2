"""Ball systems, the equal-radius augmentation, hit sets and cells."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .graph import Graph, GraphError, VoronoiLabels, load_json, shortest_paths


@dataclass(frozen=True, order=True)
class Ball:
    id: int
    center: int
    radius: int


def parse_balls(text: str | Sequence) -> list[Ball]:
    doc = load_json(text) if isinstance(text, str) else text
    if not isinstance(doc, list):
        raise GraphError("balls document must be an array")
    balls = []
    for i, rec in enumerate(doc):
        try:
            b = Ball(rec["id"], rec["center"], rec["radius"])
        except (KeyError, TypeError) as exc:
            raise GraphError(f"balls[{i}]: expected 'id', 'center', 'radius'") from exc
        for name in ("id", "center", "radius"):
            val = getattr(b, name)
            if not isinstance(val, int) or isinstance(val, bool) or val < 0:
                raise GraphError(f"balls[{i}]: {name} must be a non-negative integer")
        balls.append(b)
    if len({b.id for b in balls}) != len(balls):
        raise GraphError("balls: duplicate id")
    return balls


def balls_to_json(balls: Iterable[Ball]) -> str:
    return json.dumps([{"id": b.id, "center": b.center, "radius": b.radius} for b in balls], indent=2)


@dataclass(frozen=True)
class AugmentedGraph:
    """The host graph with one extra source node per ball.

    Node ``node_of[R]`` has a single arc into the centre of ``R`` of length
    ``rmax - radius``, so every ball becomes the radius-``rmax`` ball around
    its node.  Original vertices outside every ball are in ``removed``.
    """

    graph: Graph
    balls: Mapping[int, Ball]
    node_of: Mapping[int, int]
    rmax: int
    removed: frozenset[int]
    originals: frozenset[int]
    _trees: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def ball_of(self) -> dict[int, int]:
        return {x: b for b, x in self.node_of.items()}

    def tree(self, ball_id: int) -> VoronoiLabels:
        """Shortest-path forest from the node of ``ball_id`` (cached)."""
        if ball_id not in self._trees:
            self._trees[ball_id] = shortest_paths(self.graph, self.node_of[ball_id])
        return self._trees[ball_id]

    def dist(self, ball_id: int, v: int) -> int | None:
        return self.tree(ball_id).dist[v]

    def contains(self, ball_id: int, v: int) -> bool:
        d = self.tree(ball_id).dist.get(v)
        return d is not None and d <= self.rmax

    def path(self, ball_id: int, v: int) -> list[int]:
        return self.tree(ball_id).path(v)


def build_augmented(g: Graph, balls: Sequence[Ball], two_way: Iterable[int] = ()) -> AugmentedGraph:
    """Build the equal-radius augmentation of ``g`` for ``balls``.

    Ball ids listed in ``two_way`` also get the reverse arc centre -> node,
    which is only meaningful for undirected hosts.
    """
    if not balls:
        raise GraphError("empty ball list")
    by_id: dict[int, Ball] = {}
    for b in balls:
        if b.center not in g.weights:
            raise GraphError(f"ball {b.id}: unknown center {b.center}")
        if b.id in by_id:
            raise GraphError(f"duplicate ball id {b.id}")
        by_id[b.id] = b
    rmax = max(b.radius for b in balls)
    covered: set[int] = set()
    for b in balls:
        covered.update(shortest_paths(g, b.center, cutoff=b.radius).owner)
    removed = frozenset(v for v in g.weights if v not in covered)
    host = g.induced(covered)
    fresh = max(g.weights) + 1
    node_of = {bid: fresh + i for i, bid in enumerate(sorted(by_id))}
    weights = dict(host.weights)
    arcs = list(host.arcs)
    two_way = set(two_way)
    for bid, x in node_of.items():
        b = by_id[bid]
        weights[x] = 0
        arcs.append((x, b.center, rmax - b.radius))
        if bid in two_way:
            arcs.append((b.center, x, rmax - b.radius))
    aug = Graph.build(weights, arcs, directed=True)
    return AugmentedGraph(
        graph=aug,
        balls={bid: by_id[bid] for bid in sorted(by_id)},
        node_of=node_of,
        rmax=rmax,
        removed=removed,
        originals=frozenset(covered),
    )


HitSetTable = Mapping[int, tuple[int, ...]]


def hit_sets(aug: AugmentedGraph) -> dict[int, tuple[int, ...]]:
    """vertex -> ascending ids of the balls containing it (survivors only)."""
    hits: dict[int, list[int]] = {v: [] for v in sorted(aug.originals)}
    for bid in aug.balls:
        dist = aug.tree(bid).dist
        for v in hits:
            d = dist[v]
            if d is not None and d <= aug.rmax:
                hits[v].append(bid)
    return {v: tuple(h) for v, h in hits.items()}


@dataclass(frozen=True)
class Cell:
    hit_set: tuple[int, ...]
    members: frozenset[int]

    @property
    def representative(self) -> int:
        return min(self.members)

    @property
    def depth(self) -> int:
        return len(self.hit_set)


def enumerate_cells(hits: HitSetTable) -> list[Cell]:
    """Group vertices by hit set; cells come out sorted by hit set."""
    groups: dict[tuple[int, ...], set[int]] = {}
    for v, h in hits.items():
        groups.setdefault(tuple(h), set()).add(v)
    return [Cell(h, frozenset(groups[h])) for h in sorted(groups)]

"""Constructive checks for the shallow cell complexity of ball systems.

Every cell of depth k >= 3 receives a triple <alpha, beta, gamma> of balls;
the triples are unique per depth.  Depth-3 cells are charged to a base ball
D and drawn as edges of a planar graph on the support neighbours of D.
All arbitrary choices are made deterministic: representatives are minimum
vertex ids, distance ties break on ball id and gamma takes the minimum id.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .balls import AugmentedGraph, Ball, Cell, build_augmented, enumerate_cells, hit_sets
from .graph import Graph, GraphError
from .planarity import Embedding, embedding_of, is_planar
from .support import SupportGraph, SupportReport, dual_support_of


class DepthError(GraphError):
    pass


@dataclass(frozen=True)
class Encoding:
    alpha: int
    beta: int
    gamma: int


@dataclass(frozen=True)
class SigmaOrder:
    key: tuple[int, int, int]  # (alpha, beta, depth)
    order: tuple[int, ...]  # representatives in discovery order


@dataclass(frozen=True)
class PathBundle:
    alpha_path: tuple[int, ...]
    beta_path: tuple[int, ...]


@dataclass
class ResidentGraph:
    """G_D for one ball D.

    ``edges`` holds one edge per resident cell, including cells whose
    endpoints are not support neighbours of D; those are also listed in
    ``violations``.
    """

    host: int
    nodes: frozenset[int]  # support neighbours of D
    edges: dict[tuple[int, int], int]  # endpoint pair -> cell index
    resident: int
    violations: list[tuple[int, tuple[int, int]]] = field(default_factory=list)
    planar: bool = True

    @property
    def simple(self) -> bool:
        return len(self.edges) == self.resident

    @property
    def within_bound(self) -> bool:
        return self.resident <= 3 * max(1, len(self.nodes))

    @property
    def ok(self) -> bool:
        return self.simple and self.planar and self.within_bound


class BallSystem:
    """A ball system on a host graph with its derived structures, computed
    lazily and cached."""

    def __init__(self, g: Graph, balls: Sequence[Ball]):
        self.g = g
        self.balls = list(balls)

    @cached_property
    def aug(self) -> AugmentedGraph:
        return build_augmented(self.g, self.balls)

    @cached_property
    def hits(self) -> dict[int, tuple[int, ...]]:
        return hit_sets(self.aug)

    @cached_property
    def cells(self) -> list[Cell]:
        return enumerate_cells(self.hits)

    @cached_property
    def support(self) -> SupportGraph:
        return dual_support_of(self.aug)

    @cached_property
    def embedding(self) -> Embedding:
        return augmented_embedding(self.aug, embedding_of(self.g))

    @cached_property
    def alpha_beta(self) -> dict[int, tuple[int, int]]:
        return alpha_beta(self.aug, self.hits)

    def cells_of_depth(self, k: int) -> dict[int, Cell]:
        return {i: c for i, c in enumerate(self.cells) if c.depth == k}

    @cached_property
    def depth3_encodings(self) -> dict[int, Encoding]:
        return encodings(self, 3)

    @cached_property
    def bases(self) -> dict[int, int]:
        """depth-3 cell index -> base ball."""
        out = {}
        for i, enc in self.depth3_encodings.items():
            rep = self.cells[i].representative
            out[i] = assign_base(enc, path_bundle(self.aug, rep, enc), self.support.witness)
        return out


def augmented_embedding(aug: AugmentedGraph, base: Embedding) -> dict[int, tuple[int, ...]]:
    """Extend an embedding of the host to the augmented graph.

    Pruned vertices are dropped; the ball nodes of a centre are inserted as
    a block (ascending ball id) right after the centre's minimum-id
    neighbour.
    """
    keep = aug.originals
    emb = {v: [u for u in rot if u in keep] for v, rot in base.items() if v in keep}
    by_center: dict[int, list[int]] = defaultdict(list)
    for bid, x in aug.node_of.items():
        c = aug.balls[bid].center
        by_center[c].append(x)
        emb[x] = [c]
    for c, xs in by_center.items():
        rot = emb[c]
        if rot:
            i = rot.index(min(rot)) + 1
            emb[c] = rot[:i] + xs + rot[i:]
        else:
            emb[c] = list(xs)
    return {v: tuple(r) for v, r in emb.items()}


def _key(aug: AugmentedGraph, bid: int, v: int) -> tuple[int, int]:
    return (aug.dist(bid, v), bid)


def alpha_beta(
    aug: AugmentedGraph, hits: Mapping[int, Sequence[int]], vertices: Sequence[int] | None = None
) -> dict[int, tuple[int, int]]:
    """Furthest and second furthest containing ball for each vertex.

    Distances are compared as (distance, ball id).  Without ``vertices``
    every vertex of depth >= 2 is processed.
    """
    if vertices is None:
        vertices = [v for v, h in hits.items() if len(h) >= 2]
    out = {}
    for v in vertices:
        h = hits[v]
        if len(h) < 2:
            raise DepthError(f"vertex {v} has depth {len(h)} < 2")
        ranked = sorted(h, key=lambda b: _key(aug, b, v), reverse=True)
        out[v] = (ranked[0], ranked[1])
    return out


def path_bundle(aug: AugmentedGraph, v: int, pair: Encoding | tuple[int, int]) -> PathBundle:
    alpha, beta = (pair.alpha, pair.beta) if isinstance(pair, Encoding) else pair
    return PathBundle(tuple(aug.path(alpha, v)), tuple(aug.path(beta, v)))


# ---------------------------------------------------------------------------
# sigma order and gamma
# ---------------------------------------------------------------------------


def _tree_children(aug: AugmentedGraph, ball_id: int, reps: Sequence[int]) -> dict[int, set[int]]:
    tree = aug.tree(ball_id)
    children: dict[int, set[int]] = defaultdict(set)
    root = aug.node_of[ball_id]
    for r in reps:
        if not tree.reached(r):
            raise GraphError(f"representative {r} unreachable from ball {ball_id}")
        v = r
        while v != root:
            p = tree.parent_vertex(v)
            if v in children[p]:
                break
            children[p].add(v)
            v = p
    return children


def sigma_order(
    aug: AugmentedGraph, emb: Embedding, key: tuple[int, int, int], reps: Sequence[int]
) -> SigmaOrder:
    """Order ``reps`` by a depth-first traversal of the shortest-path tree
    of ball ``key[0]``, visiting children clockwise starting just after the
    arc through which a vertex was entered."""
    d1 = key[0]
    root = aug.node_of[d1]
    children = _tree_children(aug, d1, reps)
    wanted = set(reps)
    order: list[int] = []
    stack: list[tuple[int, int | None]] = [(root, None)]
    while stack:
        u, p = stack.pop()
        if u in wanted:
            order.append(u)
        kids = children.get(u)
        if not kids:
            continue
        rot = emb[u]
        start = rot.index(p) + 1 if p is not None else 0
        seq = [rot[(start + i) % len(rot)] for i in range(len(rot))]
        ordered = [c for c in seq if c in kids]
        if len(ordered) != len(kids):
            raise GraphError(f"embedding misses tree arcs at vertex {u}")
        for c in reversed(ordered):
            stack.append((c, u))
    return SigmaOrder(key, tuple(order))


def ancestor_pairs(aug: AugmentedGraph, ball_id: int, reps: Sequence[int]) -> list[tuple[int, int]]:
    """(a, b) pairs of representatives where a is a proper ancestor of b in
    the shortest-path tree of ``ball_id``."""
    tree = aug.tree(ball_id)
    wanted = set(reps)
    out = []
    for r in reps:
        v = tree.parent_vertex(r)
        while v is not None:
            if v in wanted:
                out.append((v, r))
            v = tree.parent_vertex(v)
    return out


def assign_gamma(
    order: SigmaOrder, hits: Mapping[int, Sequence[int]], ab: Mapping[int, tuple[int, int]]
) -> dict[int, int]:
    """representative -> gamma ball."""
    reps = order.order
    k = order.key[2]
    out = {}
    for i, v in enumerate(reps):
        h = set(hits[v])
        if k == 3 or len(reps) == 1:
            rest = h - set(ab[v])
        else:
            rest = h - set(hits[reps[i - 1]])
        out[v] = min(rest)
    return out


def encodings(system: BallSystem, k: int) -> dict[int, Encoding]:
    """cell index -> encoding for every cell of depth ``k`` (k >= 3)."""
    if k < 3:
        raise DepthError("encodings are defined for depth >= 3")
    cells = system.cells_of_depth(k)
    if not cells:
        return {}
    reps = {c.representative: i for i, c in cells.items()}
    ab = alpha_beta(system.aug, system.hits, list(reps))
    groups: dict[tuple[int, int], list[int]] = defaultdict(list)
    for v in reps:
        groups[ab[v]].append(v)
    out = {}
    for (a, b), vs in sorted(groups.items()):
        if k == 3:
            order = SigmaOrder((a, b, k), tuple(sorted(vs)))
        else:
            order = sigma_order(system.aug, system.embedding, (a, b, k), sorted(vs))
        for v, gamma in assign_gamma(order, system.hits, ab).items():
            out[reps[v]] = Encoding(a, b, gamma)
    return dict(sorted(out.items()))


def check_encodings(encs: Mapping[int, Encoding]) -> list[tuple[Encoding, tuple[int, int]]]:
    """Collisions among encodings as (encoding, (cell, cell)) pairs."""
    seen: dict[Encoding, int] = {}
    out = []
    for cell, enc in encs.items():
        if enc in seen:
            out.append((enc, (seen[enc], cell)))
        else:
            seen[enc] = cell
    return out


def verify_unique_encoding(system: BallSystem, k: int) -> SupportReport:
    encs = system.depth3_encodings if k == 3 else encodings(system, k)
    bad = check_encodings(encs)
    for cell, enc in encs.items():
        if len({enc.alpha, enc.beta, enc.gamma}) != 3 or not {enc.alpha, enc.beta, enc.gamma} <= set(
            system.cells[cell].hit_set
        ):
            bad.append((enc, (cell, cell)))
    return SupportReport(not bad, bad, {"depth": k, "cells": len(encs)})


# ---------------------------------------------------------------------------
# depth-3 charging
# ---------------------------------------------------------------------------


def assign_base(enc: Encoding, bundle: PathBundle, witness: Mapping[int, int]) -> int:
    """beta if the alpha path enters the Voronoi cell of beta, else gamma."""
    if any(witness.get(v) == enc.beta for v in bundle.alpha_path):
        return enc.beta
    return enc.gamma


def build_resident_graph(ball: int, system: BallSystem) -> ResidentGraph:
    """Graph with one edge per depth-3 cell whose base is ``ball``, joining
    the two other balls of the cell."""
    nbrs = frozenset(system.support.neighbors(ball))
    edges: dict[tuple[int, int], int] = {}
    violations = []
    resident = 0
    for i, base in system.bases.items():
        if base != ball:
            continue
        resident += 1
        a, b = sorted(set(system.cells[i].hit_set) - {ball})
        if a not in nbrs or b not in nbrs:
            violations.append((i, (a, b)))
        edges.setdefault((a, b), i)
    planar = True
    if edges:
        g = Graph.build(sorted({x for e in edges for x in e}), [(a, b, 1) for a, b in edges])
        planar = is_planar(g).planar
    return ResidentGraph(ball, nbrs, edges, resident, violations, planar)


# ---------------------------------------------------------------------------
# profile
# ---------------------------------------------------------------------------


@dataclass
class CellProfile:
    counts: dict[int, int]
    n_balls: int

    @property
    def bounds(self) -> dict[str, bool]:
        n = self.n_balls
        return {
            "depth1": self.counts.get(1, 0) <= n,
            "depth2": self.counts.get(2, 0) <= max(1, 3 * n - 6),
            "depth3": self.counts.get(3, 0) <= 18 * n,
        }

    @property
    def ratios(self) -> dict[int, float]:
        """count_k / (|R| k^2) for every depth present."""
        return {k: c / (self.n_balls * k * k) for k, c in self.counts.items()}


def shallow_profile(system: BallSystem) -> CellProfile:
    counts: dict[int, int] = defaultdict(int)
    for c in system.cells:
        counts[c.depth] += 1
    return CellProfile(dict(sorted(counts.items())), len(system.balls))


# ---------------------------------------------------------------------------
# shortest-path structure checks
# ---------------------------------------------------------------------------


def check_ancestor_subsets(system: BallSystem) -> list[tuple[int, int]]:
    """(v, v') pairs where v' lies on the alpha/beta paths of v, has the same
    alpha and beta, yet hit(v') is not contained in hit(v)."""
    ab = system.alpha_beta
    hits = system.hits
    out = []
    for v, (a, b) in ab.items():
        hv = set(hits[v])
        on_paths = set(system.aug.path(a, v)) | set(system.aug.path(b, v))
        for u in on_paths:
            if u != v and ab.get(u) == (a, b) and not set(hits[u]) <= hv:
                out.append((v, u))
    return out


def check_overtaking(system: BallSystem) -> list[tuple[int, int, int]]:
    """(D, D', v) triples where D' dominates D at the parent of v on the
    shortest-path tree of D but not at v.

    Dominance is lexicographic on (distance, ball id).  Checking every tree
    arc covers every (vertex, later vertex) pair on every tree path.
    """
    aug = system.aug
    ids = list(aug.balls)
    out = []
    for d in ids:
        tree = aug.tree(d)
        dist_d = tree.dist
        arcs = aug.graph.arcs
        for d2 in ids:
            if d2 == d:
                continue
            dist_e = aug.tree(d2).dist
            for v, a in tree.parent.items():
                if a is None:
                    continue
                p = arcs[a][0]
                if _dominates(dist_e[p], d2, dist_d[p], d) and not _dominates(dist_e[v], d2, dist_d[v], d):
                    out.append((d, d2, v))
    return out


def _dominates(de, e, dd, d) -> bool:
    if de is None:
        return False
    return (de, e) <= (dd, d)


def check_stays_in_cells(system: BallSystem) -> list[tuple[int, int, int]]:
    """(v, D, u) where u lies on the path from ball D to v but in the
    Voronoi cell of a ball not containing v."""
    witness = system.support.witness
    out = []
    for v, h in system.hits.items():
        hs = set(h)
        for d in h:
            for u in system.aug.path(d, v):
                if witness[u] not in hs:
                    out.append((v, d, u))
    return out


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def cells_report(system: BallSystem) -> dict:
    """The machine-readable cells report document."""
    profile = shallow_profile(system)
    unique = {}
    for k in profile.counts:
        if k >= 3:
            unique[str(k)] = verify_unique_encoding(system, k).passed
    resident = []
    for bid in sorted(system.aug.balls):
        rg = build_resident_graph(bid, system)
        resident.append(
            {
                "ball": bid,
                "resident": rg.resident,
                "neighbors": len(rg.nodes),
                "planar": rg.planar and rg.simple,
                "outsideNeighbors": len(rg.violations),
            }
        )
    return {
        "profile": {str(k): c for k, c in profile.counts.items()},
        "bounds": profile.bounds,
        "encodingUnique": unique,
        "residentChecks": resident,
    }


def report_passed(report: Mapping) -> bool:
    return (
        all(report["bounds"].values())
        and all(report["encodingUnique"].values())
        and all(r["planar"] and r["resident"] <= 3 * max(1, r["neighbors"]) for r in report["residentChecks"])
    )


def report_to_json(report: Mapping) -> str:
    return json.dumps(report, indent=2)

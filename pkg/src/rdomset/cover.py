"""Weighted set cover over ball systems and the r-dominating set wrapper.

The LP relaxation is solved by a multiplicative-update scheme in floating
point; primal and dual solutions are then rounded to exact rationals so the
reported cost and lower bound are certified.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .graph import Graph, GraphError, load_json, shortest_paths

K0 = 16
DEFAULT_EPS = Fraction(1, 10)
QUASI, GREEDY, EXACT = "quasi", "greedy", "exact"
METHODS = (QUASI, GREEDY, EXACT)


class CoverError(ValueError):
    pass


class LPConvergenceError(CoverError):
    pass


class ExactBudgetExceeded(CoverError):
    pass


@dataclass(frozen=True)
class CoverInstance:
    universe: frozenset[int]
    sets: Mapping[int, frozenset[int]]
    weights: Mapping[int, Fraction]

    def __post_init__(self):
        if set(self.sets) != set(self.weights):
            raise CoverError("sets and weights must have the same ids")
        for sid, w in self.weights.items():
            if w <= 0:
                raise CoverError(f"set {sid}: weight must be positive")
        covered = set().union(*self.sets.values()) if self.sets else set()
        missing = self.universe - covered
        if missing:
            raise CoverError(f"infeasible instance: element {min(missing)} is in no set")

    @classmethod
    def build(cls, universe: Iterable[int], sets: Mapping[int, Iterable[int]], weights: Mapping[int, object]):
        return cls(
            frozenset(universe),
            {s: frozenset(sets[s]) for s in sorted(sets)},
            {s: Fraction(weights[s]) for s in sorted(sets)},
        )

    def weight_of(self, chosen: Iterable[int]) -> Fraction:
        return sum((self.weights[s] for s in chosen), Fraction(0))


@dataclass(frozen=True)
class FractionalCover:
    x: Mapping[int, Fraction]
    cost: Fraction
    lower_bound: Fraction
    dual: Mapping[int, Fraction] = field(default_factory=dict)
    iterations: int = 0


@dataclass(frozen=True)
class Cover:
    chosen: frozenset[int]
    weight: Fraction
    method: str
    seed: int = 0
    lower_bound: Fraction | None = None


# ---------------------------------------------------------------------------
# LP relaxation
# ---------------------------------------------------------------------------


def _matrix(inst: CoverInstance):
    elems = sorted(inst.universe)
    index = {e: i for i, e in enumerate(elems)}
    sids = [s for s in inst.sets if inst.sets[s] & inst.universe]
    a = np.zeros((len(sids), len(elems)), dtype=np.int64)
    for r, s in enumerate(sids):
        for e in inst.sets[s]:
            if e in index:
                a[r, index[e]] = 1
    return elems, sids, a


def _certify(inst, elems, sids, a, x, p):
    """Exact (x, cost, dual, lower bound) from float primal/dual guesses."""
    scale = float(2**40)
    xi = np.ceil(x / x.max() * scale).astype(np.int64)
    cov = a.T @ xi
    denom = int(cov.min())
    xs = {s: Fraction(int(v), denom) for s, v in zip(sids, xi) if v}
    cost = sum((inst.weights[s] * q for s, q in xs.items()), Fraction(0))
    pi = np.floor(p / p.max() * scale).astype(np.int64)
    load = a @ pi
    mu = max(Fraction(int(l)) / inst.weights[s] for s, l in zip(sids, load))
    dual = {e: Fraction(int(q)) / mu for e, q in zip(elems, pi) if q}
    lower = sum(dual.values(), Fraction(0))
    return xs, cost, dual, lower


def lp_fractional_cover(inst: CoverInstance, eps=DEFAULT_EPS) -> FractionalCover:
    """(1 + eps)-approximate covering LP with a certified lower bound.

    Multiplicative weights on the elements: each round raises every set
    whose coverage-per-weight is within (1 - eps/2) of the best, by a step
    that lifts no element's coverage by more than one unit.  The best dual
    seen (element weights scaled to be feasible) bounds the optimum from
    below; iteration stops once the exact costs are within 1 + eps.
    """
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise CoverError("eps must lie in (0, 1]")
    if not inst.universe:
        return FractionalCover({}, Fraction(0), Fraction(0))
    elems, sids, a = _matrix(inst)
    af = a.astype(float)
    w = np.array([float(inst.weights[s]) for s in sids])
    n, m = len(elems), len(sids)
    cap = int(10 * n * m * max(1.0, math.log(n)) / float(eps) ** 2)
    e_in = float(eps) / 2
    eta = -math.log(1 - e_in)
    x = np.zeros(m)
    cov = np.zeros(n)
    best_p, best_lb = None, -1.0
    for it in range(1, cap + 1):
        p = np.exp(-eta * (cov - cov.min()))
        ratio = (af @ p) / w
        top = ratio.max()
        lb = p.sum() / top
        if lb > best_lb:
            best_lb, best_p = lb, p
        active = ratio >= (1 - e_in) * top
        inc = af[active].sum(axis=0)
        x[active] += 1.0 / inc.max()
        cov += inc / inc.max()
        if cov.min() > 0 and (w @ x) / cov.min() <= (1 + float(eps)) * best_lb * (1 - 1e-9):
            xs, cost, dual, lower = _certify(inst, elems, sids, a, x, best_p)
            if cost <= (1 + eps) * lower:
                return FractionalCover(xs, cost, lower, dual, it)
    raise LPConvergenceError(f"no (1+{eps}) certificate within {cap} iterations")


# ---------------------------------------------------------------------------
# rounding and baselines
# ---------------------------------------------------------------------------


def _feasible_sweep(inst: CoverInstance, chosen: set[int]) -> None:
    covered = set().union(*(inst.sets[s] for s in chosen)) if chosen else set()
    for e in sorted(inst.universe - covered):
        if e in covered:
            continue
        s = min((sid for sid, m in inst.sets.items() if e in m), key=lambda sid: (inst.weights[sid], sid))
        chosen.add(s)
        covered |= inst.sets[s]


def quasi_uniform_round(inst: CoverInstance, frac: FractionalCover, seed: int = 0) -> Cover:
    """Round a fractional cover by repeated halving of a multiset of sets.

    Each set R starts with ceil(16 x_R) copies.  In each of four rounds every
    mortal copy survives with probability 1/2; elements whose surviving
    depth fell below max(1, ceil(16 / 2^i)) get dropped copies back,
    cheapest set first, and revived copies become immortal.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    order = sorted(inst.sets)
    mortal = {s: math.ceil(frac.x.get(s, 0) * K0) for s in order}
    immortal = dict.fromkeys(order, 0)
    dead = dict.fromkeys(order, 0)
    covering: dict[int, list[int]] = {e: [] for e in inst.universe}
    for s in order:
        for e in inst.sets[s]:
            if e in covering:
                covering[e].append(s)
    for e in covering:
        covering[e].sort(key=lambda s: (inst.weights[s], s))
    for i in range(1, math.ceil(math.log2(K0)) + 1):
        for s in order:
            if mortal[s]:
                keep = int(rng.binomial(mortal[s], 0.5))
                dead[s] += mortal[s] - keep
                mortal[s] = keep
        depth = {e: sum(mortal[s] + immortal[s] for s in covering[e]) for e in covering}
        threshold = max(1, math.ceil(K0 / 2**i))
        for e in sorted(covering):
            while depth[e] < threshold:
                s = next(s for s in covering[e] if dead[s])
                dead[s] -= 1
                immortal[s] += 1
                for f in inst.sets[s]:
                    if f in depth:
                        depth[f] += 1
    chosen = {s for s in order if mortal[s] + immortal[s]}
    _feasible_sweep(inst, chosen)
    return Cover(frozenset(chosen), inst.weight_of(chosen), QUASI, seed, frac.lower_bound)


def greedy_cover(inst: CoverInstance) -> Cover:
    """Repeatedly take the set with least weight per newly covered element."""
    uncovered = set(inst.universe)
    chosen = set()
    while uncovered:
        best = None
        for s, members in inst.sets.items():
            gain = len(members & uncovered)
            if gain:
                key = (inst.weights[s] / gain, s)
                if best is None or key < best:
                    best = key
        s = best[1]
        chosen.add(s)
        uncovered -= inst.sets[s]
    return Cover(frozenset(chosen), inst.weight_of(chosen), GREEDY)


@dataclass(frozen=True)
class ExactBudget:
    max_sets: int | None = 24
    max_nodes: int = 2_000_000


def exact_cover(inst: CoverInstance, budget: ExactBudget = ExactBudget()) -> Cover:
    """Optimal cover by branch and bound.

    Branches on the uncovered element with the fewest usable sets (so an
    element with a single usable set forces it) and prunes with the bound
    sum over uncovered e of min over sets S containing e of w(S)/|S n uncovered|.
    """
    if budget.max_sets is not None and len(inst.sets) > budget.max_sets:
        raise ExactBudgetExceeded(f"{len(inst.sets)} sets exceed the cap of {budget.max_sets}")
    if not inst.universe:
        return Cover(frozenset(), Fraction(0), EXACT, lower_bound=Fraction(0))
    elems = sorted(inst.universe)
    bit = {e: 1 << i for i, e in enumerate(elems)}
    sids = [s for s in inst.sets if inst.sets[s] & inst.universe]
    lcm = math.lcm(*(inst.weights[s].denominator for s in sids))
    wint = {s: int(inst.weights[s] * lcm) for s in sids}
    mask = {s: sum(bit[e] for e in inst.sets[s] if e in bit) for s in sids}
    holders = {e: [s for s in sids if mask[s] & bit[e]] for e in elems}
    upper = greedy_cover(inst)
    best = [int(upper.weight * lcm), set(upper.chosen)]
    nodes = [0]

    def bound(unc: int, banned: set[int]) -> float:
        total = 0.0
        for e in elems:
            if unc & bit[e]:
                total += min(wint[s] / bin(mask[s] & unc).count("1") for s in holders[e] if s not in banned)
        return total

    def rec(unc: int, cost: int, chosen: list[int], banned: set[int]) -> None:
        nodes[0] += 1
        if nodes[0] > budget.max_nodes:
            raise ExactBudgetExceeded(f"more than {budget.max_nodes} branch-and-bound nodes")
        if not unc:
            if cost < best[0]:
                best[0], best[1] = cost, set(chosen)
            return
        pick, options = None, None
        for e in elems:
            if unc & bit[e]:
                opts = [s for s in holders[e] if s not in banned]
                if not opts:
                    return
                if options is None or len(opts) < len(options):
                    pick, options = e, opts
                    if len(opts) == 1:
                        break
        if cost + bound(unc, banned) * (1 - 1e-12) >= best[0]:
            return
        options.sort(key=lambda s: (wint[s] / bin(mask[s] & unc).count("1"), s))
        excluded = []
        for s in options:
            chosen.append(s)
            rec(unc & ~mask[s], cost + wint[s], chosen, banned | set(excluded))
            chosen.pop()
            excluded.append(s)

    full = 0
    for e in elems:
        full |= bit[e]
    rec(full, 0, [], set())
    chosen = frozenset(best[1])
    weight = inst.weight_of(chosen)
    return Cover(chosen, weight, EXACT, lower_bound=weight)


def verify_cover(inst: CoverInstance, c: Cover) -> bool:
    if not set(c.chosen) <= set(inst.sets):
        return False
    covered = set().union(*(inst.sets[s] for s in c.chosen)) if c.chosen else set()
    return inst.universe <= covered and c.weight == inst.weight_of(c.chosen)


# ---------------------------------------------------------------------------
# r-dominating set
# ---------------------------------------------------------------------------


def rdom_instance(g: Graph, r: int) -> CoverInstance:
    """One radius-r ball per vertex, weighted by the vertex, covering V."""
    if g.directed:
        raise GraphError("r-dominating set expects an undirected graph")
    if r < 0:
        raise GraphError("radius must be non-negative")
    sets = {v: shortest_paths(g, v, cutoff=r).owner.keys() for v in g.weights}
    return CoverInstance.build(g.weights, sets, g.weights)


def solve_instance(
    inst: CoverInstance,
    method: str = QUASI,
    seed: int = 0,
    eps=DEFAULT_EPS,
    budget: ExactBudget = ExactBudget(),
    frac: FractionalCover | None = None,
) -> Cover:
    if method == QUASI:
        frac = frac if frac is not None else lp_fractional_cover(inst, eps)
        return quasi_uniform_round(inst, frac, seed)
    if method == GREEDY:
        c = greedy_cover(inst)
    elif method == EXACT:
        c = exact_cover(inst, budget)
    else:
        raise CoverError(f"unknown method {method!r}")
    return Cover(c.chosen, c.weight, c.method, seed, c.lower_bound)


def solve_rdomset(
    g: Graph,
    r: int,
    seed: int = 0,
    method: str = QUASI,
    eps=DEFAULT_EPS,
    budget: ExactBudget = ExactBudget(),
) -> Cover:
    """Approximate minimum-weight r-dominating set; centres are ``chosen``."""
    return solve_instance(rdom_instance(g, r), method, seed, eps, budget)


def _number(x):
    if x is None:
        return None
    x = Fraction(x)
    return int(x) if x.denominator == 1 else float(x)


def solution_document(c: Cover, feasible: bool) -> dict:
    return {
        "method": c.method,
        "seed": c.seed,
        "centers": sorted(c.chosen),
        "weight": _number(c.weight),
        "lowerBound": _number(c.lower_bound),
        "feasible": feasible,
    }


def solution_to_json(c: Cover, feasible: bool) -> str:
    return json.dumps(solution_document(c, feasible), indent=2)


def parse_solution(text: str | Mapping) -> tuple[Cover, bool]:
    doc = load_json(text) if isinstance(text, str) else text
    try:
        lb = doc["lowerBound"]
        c = Cover(
            frozenset(doc["centers"]),
            Fraction(doc["weight"]),
            doc["method"],
            doc["seed"],
            None if lb is None else Fraction(lb),
        )
        return c, bool(doc["feasible"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CoverError(f"malformed solution document: {exc}") from exc

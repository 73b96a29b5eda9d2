"""Acceptance suite: one test per criterion, each printing a pass/fail line."""
from __future__ import annotations

import math
import random
import statistics
import time
from fractions import Fraction

import pytest

from conftest import record_criterion
from corpus import diameter_bound, planar_corpus, rdom_corpus, red_blue_corpus
from rdomset.cover import (
    EXACT,
    GREEDY,
    QUASI,
    CoverInstance,
    lp_fractional_cover,
    rdom_instance,
    solve_instance,
    verify_cover,
)
from rdomset.planarity import is_planar
from rdomset.shallow import (
    BallSystem,
    build_resident_graph,
    check_ancestor_subsets,
    check_overtaking,
    shallow_profile,
    verify_unique_encoding,
)
from rdomset.support import (
    DIRECTED_PIPELINE,
    UNDIRECTED_SHORTCUT,
    build_intersection_support,
    verify_dual_support,
    verify_intersection_support,
    verify_minor_preservation,
)

SEEDS = range(10)
EPS = Fraction(1, 10)
ORACLE_SETS = 20


@pytest.fixture(scope="module")
def corpus():
    return planar_corpus(200)


@pytest.fixture(scope="module")
def systems(corpus):
    return [BallSystem(inst.graph, inst.balls) for inst in corpus]


def ball_cover_instance(system: BallSystem, rng: random.Random) -> CoverInstance:
    """Cover the vertices lying in some ball with the balls themselves."""
    sets: dict[int, set[int]] = {b.id: set() for b in system.balls}
    for v, h in system.hits.items():
        for bid in h:
            sets[bid].add(v)
    universe = set().union(*sets.values())
    weights = {bid: rng.randint(1, 10) for bid in sets}
    return CoverInstance.build(universe, sets, weights)


@pytest.fixture(scope="module")
def solver_runs(systems):
    """Every method on every instance: LP once, quasi for 10 seeds, greedy,
    and exact where the instance has at most ORACLE_SETS sets."""
    rng = random.Random(7)
    instances = [(f"balls-{i:03d}", ball_cover_instance(s, rng)) for i, s in enumerate(systems)]
    for i, (g, r) in enumerate(rdom_corpus(80, ORACLE_SETS, seed=11)):
        instances.append((f"rdom-small-{i:02d}-r{r}", rdom_instance(g, r)))
    for i, (g, r) in enumerate(rdom_corpus(20, 120, seed=13)):
        instances.append((f"rdom-large-{i:02d}-r{r}", rdom_instance(g, r)))
    runs = []
    for name, inst in instances:
        frac = lp_fractional_cover(inst, EPS)
        covers = [solve_instance(inst, QUASI, seed, EPS, frac=frac) for seed in SEEDS]
        covers.append(solve_instance(inst, GREEDY))
        exact = solve_instance(inst, EXACT) if len(inst.sets) <= ORACLE_SETS else None
        if exact is not None:
            covers.append(exact)
        runs.append((name, inst, frac, covers, exact))
    return runs


def test_criterion_01_dual_support(corpus, systems):
    start = time.perf_counter()
    failed = [inst.name for inst, s in zip(corpus, systems) if not verify_dual_support(s.support, s.hits).passed]
    elapsed = time.perf_counter() - start
    big = sum(any(b.radius > diameter_bound(inst.graph) for b in inst.balls) for inst in corpus)
    ok = not failed and elapsed < 60
    record_criterion(
        1, ok, f"{len(corpus) - len(failed)}/{len(corpus)} instances pass, "
        f"{big} with r > diameter, {elapsed:.1f}s (limit 60s)"
    )
    assert not failed, failed[:5]
    assert elapsed < 60


def test_criterion_02_planarity(corpus, systems):
    bad = []
    for inst, s in zip(corpus, systems):
        sup = s.support
        n, m = len(sup.nodes), len(sup.edges)
        if not is_planar(sup.as_graph()).planar or (n >= 3 and m > 3 * n - 6):
            bad.append(inst.name)
        elif not verify_minor_preservation(inst.graph, sup).passed:
            bad.append(inst.name)
    record_criterion(2, not bad, f"{len(corpus) - len(bad)}/{len(corpus)} supports planar, sparse and minors")
    assert not bad, bad[:5]


def test_criterion_03_intersection_support():
    directed = red_blue_corpus(100, directed=True, seed=303)
    undirected = red_blue_corpus(60, directed=False, seed=304)
    bad = []
    for inst, blue in directed:
        s = build_intersection_support(inst.graph, inst.balls, blue, DIRECTED_PIPELINE)
        if not verify_intersection_support(s, inst.balls, blue, inst.graph).passed:
            bad.append((inst.name, DIRECTED_PIPELINE))
    shortcut_failures = 0
    for inst, blue in undirected:
        for mode in (DIRECTED_PIPELINE, UNDIRECTED_SHORTCUT):
            s = build_intersection_support(inst.graph, inst.balls, blue, mode)
            if not verify_intersection_support(s, inst.balls, blue, inst.graph).passed:
                bad.append((inst.name, mode))
                shortcut_failures += mode == UNDIRECTED_SHORTCUT
    record_criterion(
        3, not bad, f"{len(directed)} directed + {len(undirected)}x2 undirected runs, "
        f"{len(bad)} failures ({shortcut_failures} from the shortcut mode)"
    )
    assert not bad, bad[:5]


def test_criterion_04_encoding_uniqueness(corpus, systems):
    bad, checked = [], 0
    for inst, s in zip(corpus, systems):
        for k in shallow_profile(s).counts:
            if k >= 3:
                checked += 1
                if not verify_unique_encoding(s, k).passed:
                    bad.append((inst.name, k))
    record_criterion(4, not bad, f"{checked} (instance, depth) pairs checked, {len(bad)} collisions")
    assert not bad, bad[:5]


def test_criterion_05_counting_bounds(corpus, systems):
    bad = []
    worst: dict[int, float] = {}
    for inst, s in zip(corpus, systems):
        prof = shallow_profile(s)
        if not all(prof.bounds.values()):
            bad.append((inst.name, prof.bounds))
        for k, ratio in prof.ratios.items():
            worst[k] = max(worst.get(k, 0.0), ratio)
    top = max(worst.values())
    shown = ", ".join(f"k={k}:{worst[k]:.3f}" for k in sorted(worst)[:6])
    record_criterion(
        5, not bad, f"depth 1/2/3 bounds hold on {len(corpus) - len(bad)}/{len(corpus)}; "
        f"max count_k/(|R|k^2) = {top:.3f} ({shown}, ...)"
    )
    print("count_k/(|R|k^2) corpus maxima:", {k: round(worst[k], 4) for k in sorted(worst)})
    assert not bad, bad[:5]


def test_criterion_06_resident_graphs(corpus, systems):
    bad, checked, outside = [], 0, 0
    for inst, s in zip(corpus, systems):
        for b in s.balls:
            rg = build_resident_graph(b.id, s)
            checked += 1
            outside += len(rg.violations)
            if not (rg.simple and rg.planar and rg.within_bound):
                bad.append((inst.name, b.id))
    record_criterion(
        6, not bad, f"{checked} balls: G_D simple, planar and within 3*max(1,|N_H(D)|) "
        f"on {checked - len(bad)}; {outside} resident edges with an endpoint outside N_H(D) reported"
    )
    assert not bad, bad[:5]


def test_criterion_07_feasibility(solver_runs):
    total = sum(len(covers) for _, _, _, covers, _ in solver_runs)
    bad = [(name, c.method, c.seed) for name, inst, _, covers, _ in solver_runs for c in covers if not verify_cover(inst, c)]
    ok = not bad and total >= 2000
    record_criterion(7, ok, f"{total - len(bad)}/{total} covers verified over {len(solver_runs)} instances")
    assert not bad, bad[:5]
    assert total >= 2000


def test_criterion_08_lp_certificate(solver_runs):
    gap = [name for name, _, frac, _, _ in solver_runs if frac.cost > (1 + EPS) * frac.lower_bound]
    oracle = [(name, frac, exact) for name, _, frac, _, exact in solver_runs if exact is not None]
    above = [name for name, frac, exact in oracle if frac.lower_bound > exact.weight]
    worst = max(float(frac.cost / frac.lower_bound) for _, _, frac, _, _ in solver_runs if frac.lower_bound)
    ok = not gap and not above and len(oracle) >= 50
    record_criterion(
        8, ok, f"cost <= 1.1*LB on {len(solver_runs) - len(gap)}/{len(solver_runs)} (worst {worst:.4f}); "
        f"LB <= OPT on {len(oracle) - len(above)}/{len(oracle)} oracle instances"
    )
    assert not gap, gap[:5]
    assert not above, above[:5]
    assert len(oracle) >= 50


def test_criterion_09_approximation_quality(solver_runs):
    ratios = [
        float(c.weight / exact.weight)
        for _, _, _, covers, exact in solver_runs if exact is not None
        for c in covers if c.method == QUASI
    ]
    top, med = max(ratios), statistics.median(ratios)
    q = statistics.quantiles(ratios, n=10)
    ok = top <= 10 and med <= 3
    record_criterion(
        9, ok, f"{len(ratios)} quasi/exact ratios: max {top:.3f} (<= 10), median {med:.3f} (<= 3), "
        f"p90 {q[-1]:.3f}"
    )
    print("quasi/exact deciles:", [round(x, 3) for x in q])
    assert top <= 10
    assert med <= 3


def test_criterion_10_greedy_guarantee(solver_runs):
    bad, checked = [], 0
    for name, inst, _, covers, exact in solver_runs:
        if exact is None or not inst.universe:
            continue
        checked += 1
        greedy = next(c for c in covers if c.method == GREEDY)
        if greedy.weight > Fraction(math.log(len(inst.universe)) + 1) * exact.weight:
            bad.append(name)
    record_criterion(10, not bad, f"greedy within (ln|U|+1)*OPT on {checked - len(bad)}/{checked} oracle instances")
    assert not bad, bad[:5]


def test_criterion_11_shortest_path_lemmas(corpus, systems):
    bad, checked = [], 0
    for inst, s in zip(corpus, systems):
        if len(inst.graph) > 200:
            continue
        checked += 1
        if check_ancestor_subsets(s) or check_overtaking(s):
            bad.append(inst.name)
    record_criterion(11, not bad, f"ancestor-subset and overtaking checks pass on {checked - len(bad)}/{checked} instances")
    assert not bad, bad[:5]

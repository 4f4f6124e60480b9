import itertools
import random

import pytest

from balance.figures import FIG4_UNFAVORABLE_WEIGHTS
from balance.graph import Graph, WeightedGraph
from balance.label import verify_labeling
from balance.oracle import BudgetExceeded, Labeled, Unsolvable, oracle_count, oracle_solve, search_order
from balance.ring import RingSpec

from conftest import connected_graphs, random_weights

Z2, Z3 = RingSpec(2), RingSpec(3)


def edge(ring, d):
    return WeightedGraph.build(ring, {(1, 2): d})


def brute_force(wg):
    """All labelings in search order, lexicographic in (alpha, beta) per vertex."""
    mod = wg.ring.modulus
    order = search_order(wg)
    pairs = list(itertools.product(range(mod), repeat=2))
    for combo in itertools.product(pairs, repeat=len(order)):
        lab = {v: (wg.ring(a), wg.ring(b)) for v, (a, b) in zip(order, combo)}
        if verify_labeling(wg, lab):
            yield lab


def test_solve_examples():
    out = oracle_solve(edge(Z3, 1))
    assert isinstance(out, Labeled) and verify_labeling(edge(Z3, 1), out.labeling)
    out = oracle_solve(WeightedGraph.build(Z3, FIG4_UNFAVORABLE_WEIGHTS))
    assert isinstance(out, Unsolvable)
    zeros = WeightedGraph.build(Z3, {(1, 2): 0, (2, 3): 0, (1, 3): 0})
    assert oracle_solve(zeros).labeling == {v: (Z3(0), Z3(0)) for v in (1, 2, 3)}


def test_single_edge_d1_has_a_labeling():
    wg = edge(Z3, 1)
    assert verify_labeling(wg, {1: (Z3(1), Z3(0)), 2: (Z3(0), Z3(1))})
    assert verify_labeling(wg, oracle_solve(wg).labeling)


def test_count_examples():
    assert oracle_count(edge(Z3, 0)) == 33
    assert oracle_count(edge(Z2, 1)) == 6
    assert oracle_count(WeightedGraph.build(Z3, {})) == 1


def test_first_solution_is_least_in_assignment_order():
    rng = random.Random(3)
    for g in connected_graphs(2, 3):
        for ring in (Z2, Z3):
            for _ in range(4):
                wg = random_weights(g, ring, rng)
                expected = next(brute_force(wg), None)
                out = oracle_solve(wg)
                if expected is None:
                    assert isinstance(out, Unsolvable)
                else:
                    assert out.labeling == expected


def test_count_matches_brute_force():
    rng = random.Random(4)
    for g in connected_graphs(2, 3):
        wg = random_weights(g, Z3, rng)
        assert oracle_count(wg) == sum(1 for _ in brute_force(wg))


def test_budget():
    wg = WeightedGraph.build(Z3, FIG4_UNFAVORABLE_WEIGHTS)
    assert oracle_solve(wg, budget=10) == BudgetExceeded(10)
    assert oracle_count(wg, budget=10) == BudgetExceeded(10)
    with pytest.raises(ValueError):
        oracle_solve(wg, budget=0)


def test_domain_restriction():
    wg = edge(Z3, 0)
    out = oracle_solve(wg, allowed=lambda v, a, b: (a, b) != (0, 0))
    assert all(p != (Z3(0), Z3(0)) for p in out.labeling.values())
    assert isinstance(oracle_solve(wg, allowed=lambda v, a, b: False), Unsolvable)

import itertools

import networkx as nx
import pytest

from balance.classify import (PreconditionError, anchors, anchors_all, check_unfavorable, classify, eta,
                              find_bad_cycles, find_frame, find_unfavorable_proximities, forced_anchor_points,
                              is_admissible, is_borderless, is_maximal_admissible, is_net,
                              satisfies_net_conditions, sign_clause_violations, sign_function)
from balance.figures import (FIG1_EDGES, FIG3_EDGES, FIG4_EDGES, FIG4_UNFAVORABLE_WEIGHTS, FIG5_EDGES,
                             NET_COND12_EDGES, NET_COND13_EDGES)
from balance.graph import Graph, WeightedGraph, cycle_graph, path_graph, simple_cycles
from balance.ring import RingSpec

from conftest import connected_graphs, nets_upto, to_nx

FIG1, FIG3, FIG4, FIG5 = (Graph.from_edges(e) for e in (FIG1_EDGES, FIG3_EDGES, FIG4_EDGES, FIG5_EDGES))
THETA = Graph.from_edges([(1, 2), (2, 3), (1, 4), (4, 3), (1, 5), (5, 3)])


def test_bad_cycle_examples():
    bad = find_bad_cycles(FIG4)
    assert len(bad) == 1
    assert bad[0].cycle == (1, 2, 3) and bad[0].low_degree_pair == (2, 3)
    assert find_bad_cycles(FIG5) == []
    assert find_bad_cycles(cycle_graph(3)) == []


def test_bad_cycles_match_definition_exhaustively():
    for g in connected_graphs(3, 6):
        expected = set()
        for c in simple_cycles(g):
            r = len(c)
            for k in range(r):
                rot = c[k:] + c[:k]
                for seq in (rot, tuple(reversed(rot))):
                    if all(g.degree(v) > 2 for v in seq[:r - 2]) and g.degree(seq[-1]) == g.degree(seq[-2]) == 2:
                        expected.add(c)
        assert {b.cycle for b in find_bad_cycles(g)} == expected


def test_unfavorable_proximity_examples():
    z3 = RingSpec(3)
    wg = WeightedGraph.build(z3, FIG4_UNFAVORABLE_WEIGHTS)
    prox = find_unfavorable_proximities(wg)
    assert len(prox) == 1 and check_unfavorable(wg, prox[0])
    assert prox[0].attachments == ((1, 4),)
    assert find_unfavorable_proximities(WeightedGraph.build(z3, {e: 1 for e in FIG4_EDGES})) == []
    tree = WeightedGraph.build(z3, {e: 1 for e in path_graph(5).edges})
    assert find_unfavorable_proximities(tree) == []


def test_triangle_pendant_weights_1001_are_not_unfavorable():
    # these weights put the unit on the edge 1-2, outside the low pair (2, 3)
    wg = WeightedGraph.build(RingSpec(3), {(1, 2): 1, (2, 3): 0, (1, 3): 0, (1, 4): 1})
    assert find_unfavorable_proximities(wg) == []


def test_borderless_examples():
    assert is_borderless(FIG1) == (True, None)
    ok, witness = is_borderless(FIG3)
    assert not ok and set(witness[0]) & set(witness[1]) >= {2, 4}
    assert is_borderless(path_graph(6))[0]
    with pytest.raises(PreconditionError):
        is_borderless(Graph.from_edges([(1, 2), (3, 4)]))


def test_borderless_agrees_with_pairwise_definition():
    for g in connected_graphs(1, 6):
        cycles = [set(c) for c in nx.simple_cycles(to_nx(g))]
        expected = all(len(a & b) <= 1 for a, b in itertools.combinations(cycles, 2))
        assert is_borderless(g)[0] == expected


def test_net_examples():
    assert is_net(FIG3) and is_net(cycle_graph(5))
    assert not is_net(Graph.from_edges(NET_COND13_EDGES))
    assert not is_net(Graph.from_edges(NET_COND12_EDGES))
    assert eta(cycle_graph(7)) == 1 and eta(FIG3) == 2 and eta(THETA) == 2
    with pytest.raises(PreconditionError):
        eta(path_graph(3))


def test_nets_are_exactly_the_constructible_graphs():
    built = nets_upto(7)
    # biconnected graph counts on 3..7 vertices
    assert [sum(len(g.vertex_set) == n for g in built) for n in range(3, 8)] == [1, 3, 10, 56, 468]
    keys = {nx.weisfeiler_lehman_graph_hash(to_nx(g)) for g in built}
    for g in connected_graphs(1, 7):
        if is_net(g):
            assert any(nx.is_isomorphic(to_nx(g), to_nx(h)) for h in built
                       if len(h.edges) == len(g.edges) and len(h.vertex_set) == len(g.vertex_set))
        else:
            assert nx.weisfeiler_lehman_graph_hash(to_nx(g)) not in keys or not nx.is_biconnected(to_nx(g))


def test_three_conditions_are_necessary_for_nets():
    for g in nets_upto(7):
        if not g.is_cycle():
            assert satisfies_net_conditions(g)


def test_three_conditions_are_not_sufficient():
    # two 4-cycles through v3 joined again by the path 5-7-6: every cycle shares a segment
    # with another, yet v3 is a cut vertex
    g = Graph.from_edges([(1, 2), (2, 3), (3, 4), (4, 1), (1, 5), (3, 5), (3, 6), (6, 7), (7, 8), (8, 3), (6, 8)])
    found = [h for h in connected_graphs(1, 7) if satisfies_net_conditions(h) and not is_net(h)]
    assert len(found) == 6


def test_anchor_examples():
    assert anchors(cycle_graph(3)) == frozenset()
    assert anchors(path_graph(5)) == frozenset(range(1, 6))
    # every pendant-augmented vertex has degree 3, so the whole C4 is admissible
    assert anchors(cycle_graph(4)) == frozenset({1, 2, 3, 4})
    assert anchors_all(cycle_graph(4)) == [frozenset({1, 2, 3, 4})]
    assert not is_admissible(cycle_graph(4), {1, 2})
    assert is_admissible(cycle_graph(4), set())


def test_anchors_are_admissible_and_maximal():
    for g in connected_graphs(1, 6):
        a = anchors(g)
        if find_bad_cycles(g):
            assert not is_admissible(g, forced_anchor_points(g))
            assert a in anchors_all(g)
        else:
            assert forced_anchor_points(g) <= a
        assert is_admissible(g, a) and is_maximal_admissible(g, a)
        for v in g.vertex_set - a:
            assert not is_admissible(g, a | {v})


def test_sign_function_examples():
    assert sign_function(cycle_graph(3), set()) == {1: 0, 2: 0, 3: 0}
    c5 = cycle_graph(5)
    assert sign_function(c5, {2, 4, 5}, 2) == {1: 0, 2: 1, 3: 0, 4: -1, 5: -1}
    a = anchors(FIG3)
    s = sign_function(FIG3, a, min(a))
    assert sign_clause_violations(FIG3, a, s) == []


def test_sign_functions_satisfy_clauses_and_negate():
    for g in nets_upto(7):
        if find_bad_cycles(g):
            continue
        fr = find_frame(g)
        if fr is None:
            continue
        neg = {v: -s for v, s in fr.sign.items()}
        assert sign_clause_violations(g, fr.anchor, fr.sign) == []
        assert sign_clause_violations(g, fr.anchor, neg) == []
        for v in sorted(fr.anchor):
            s = sign_function(g, fr.anchor, v)
            assert s[v] == 1 and sign_clause_violations(g, fr.anchor, s) == []


def test_borderless_paths_stay_on_cycles():
    for g in connected_graphs(3, 7):
        if not is_borderless(g)[0]:
            continue
        h = to_nx(g)
        for c in simple_cycles(g):
            cs = set(c)
            for u, v in itertools.combinations(c, 2):
                for path in nx.all_simple_paths(h, u, v):
                    assert set(path) <= cs


def test_classification_report():
    rep = classify(FIG3)
    assert (rep["net"], rep["eta"], rep["borderless"]) == (True, 2, False)
    assert rep["bad_cycles"] == []
    rep = classify(WeightedGraph.build(RingSpec(3), FIG4_UNFAVORABLE_WEIGHTS))
    assert rep["bad_cycles"] == [{"cycle": [1, 2, 3], "low_degree_pair": [2, 3]}]
    assert len(rep["unfavorable_proximities"]) == 1
    assert classify(Graph.from_edges([(1, 2), (3, 4)])) == {"connected": False}

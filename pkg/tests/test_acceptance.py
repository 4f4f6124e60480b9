"""Acceptance criteria. Each test carries a `criterion` marker; the terminal summary
prints one PASS/FAIL line per criterion (an expected failure prints FAIL)."""

import itertools
import random
import time

import pytest

from balance.bilinear import AlternatingMap, attainable_d_vectors, rank
from balance.classify import (PreconditionError, anchors, eta, find_bad_cycles, find_frame,
                              is_admissible, is_borderless, is_maximal_admissible, is_net, sign_clause_violations,
                              sign_function)
from balance.decompose import decompose_net
from balance.figures import FIG4_UNFAVORABLE_WEIGHTS, FIG5_EDGES, FIG6_EDGES, GAMMA4_EDGES
from balance.graph import Graph, WeightedGraph, cycle_graph, maximal_segments, segment_edges
from balance.groups import (commutator_image, derived_box, element_order, enumerate_closure, formula_sizes,
                            group_from_graph)
from balance.label import (Labeled, NoSolution, Unknown, cycle_clause_violations, cycle_residue2_clause_violations,
                           label_borderless, label_cycle, label_cycle_residue2, label_general,
                           label_general_residue2, label_net, net_clause_violations, residue2_conditions,
                           verify_labeling)
from balance.oracle import Labeled as OracleLabeled, Unsolvable, oracle_solve
from balance.ring import RingSpec

from conftest import connected_graphs, nets_upto, random_weights

Z2, Z3, Z4, Z5, Z9 = RingSpec(2), RingSpec(3), RingSpec(2, 2), RingSpec(5), RingSpec(3, 2)
SEED = 20240607


def units(ring):
    return [x for x in range(ring.modulus) if x % ring.p]


# ---------------------------------------------------------------- 1

@pytest.mark.criterion(1, "labeling soundness sweep over Z/3, graphs with 3-5 vertices")
def test_labeling_soundness_sweep():
    start = time.time()
    rng = random.Random(SEED)
    counts = {"Labeled": 0, "NoSolution": 0, "Unknown": 0}
    for g in connected_graphs(3, 5):
        edges = g.sorted_edges()
        if 3 ** len(edges) <= 3 ** 6:
            schedule = itertools.product(range(3), repeat=len(edges))
        else:
            schedule = [tuple(rng.randrange(3) for _ in edges) for _ in range(200)]
        for ws in schedule:
            wg = WeightedGraph.build(Z3, dict(zip(edges, ws)), g.n)
            out = label_general(wg)
            counts[type(out).__name__] += 1
            if isinstance(out, Unknown):
                continue
            truth = oracle_solve(wg)
            if isinstance(out, Labeled):
                assert verify_labeling(wg, out.labeling)
                assert isinstance(truth, OracleLabeled)
            else:
                assert isinstance(truth, Unsolvable)
    print(f"outcomes {counts}")
    assert counts["Labeled"] and counts["NoSolution"]
    assert time.time() - start < 300


# ---------------------------------------------------------------- 2

@pytest.mark.criterion(2, "commutator image of the Gamma4 group misses c12*c34; C4 group is full")
def test_commutator_image_gamma4_and_c4():
    start = time.time()
    pres = group_from_graph(Graph.from_edges(GAMMA4_EDGES), 3, 1)
    image = commutator_image(pres)
    box = derived_box(pres)
    assert len(box) == 81 and image < box
    # (1,0,1,0) in the order e12, e23, e34, e13
    missing = pres.central_from_edges({(1, 2): 1, (2, 3): 0, (3, 4): 1, (1, 3): 0}).central_exponents
    assert missing not in image
    assert time.time() - start < 1
    start = time.time()
    c4 = group_from_graph(cycle_graph(4), 3, 1)
    assert commutator_image(c4) == derived_box(c4)
    assert time.time() - start < 1


# ---------------------------------------------------------------- 3

@pytest.mark.criterion(3, "fig4 weights (1,0,0,1) over Z/3: proximity certificate and oracle exhaustion")
@pytest.mark.xfail(strict=True, reason="with these weights the low edge (2,3) has weight 0, so there is no "
                                       "unfavorable proximity and the oracle finds a labeling")
def test_nonexistence_certificate_weights_1001():
    start = time.time()
    wg = WeightedGraph.build(Z3, {(1, 2): 1, (2, 3): 0, (1, 3): 0, (1, 4): 1})
    out = label_general(wg)
    truth = oracle_solve(wg)
    assert isinstance(truth, Unsolvable) and truth.nodes <= 3 ** 8
    assert isinstance(out, NoSolution) and out.route == "proximity"
    assert time.time() - start < 1


def test_nonexistence_certificate_with_corrected_weights():
    wg = WeightedGraph.build(Z3, FIG4_UNFAVORABLE_WEIGHTS)
    out = label_general(wg)
    assert isinstance(out, NoSolution) and out.route == "proximity"
    assert out.certificate.cycle == (1, 2, 3)
    truth = oracle_solve(wg)
    assert isinstance(truth, Unsolvable) and truth.nodes <= 3 ** 8


# ---------------------------------------------------------------- 4

def small_presentations(count, seed):
    """Every labelled graph group with at most 3^6 elements (there are 31), topped up
    to `count` with seeded draws from groups with at most 3^8 elements."""
    small, larger = set(), set()
    for h in connected_graphs(2, 6):
        for g in _with_edge_12(h):
            E, V = len(g.edges), g.n
            for p in (2, 3, 5):
                for r in (1, 2):
                    size = p ** (E + V + 3 * r - 3)
                    key = (tuple(g.sorted_edges()), g.n, p, r)
                    if size <= 3 ** 6:
                        small.add(key)
                    elif size <= 3 ** 8:
                        larger.add(key)
    rng = random.Random(seed)
    chosen = sorted(small) + rng.sample(sorted(larger), max(0, count - len(small)))
    return [(Graph.from_edges(edges, n), p, r) for edges, n, p, r in chosen]


def _with_edge_12(g):
    """Relabelings of g sending each edge to {1, 2}, other vertices kept in order."""
    for u, v in g.sorted_edges():
        rest = [x for x in sorted(g.vertex_set) if x not in (u, v)]
        perm = {u: 1, v: 2, **{x: k + 3 for k, x in enumerate(rest)}}
        yield Graph.from_edges([(perm[a], perm[b]) for a, b in g.edges], g.n)


@pytest.mark.criterion(4, "group order, derived subgroup and exponent formulas on 50 presentations")
def test_structural_formulas():
    start = time.time()
    seen_primes = set()
    for g, p, r in small_presentations(50, SEED):
        pres = group_from_graph(g, p, r)
        want = formula_sizes(g, p, r)
        gens = [pres.generator(i) for i in range(1, g.n + 1)]
        elems = enumerate_closure(gens)
        assert len(elems) == want["order"] == p ** (len(g.edges) + g.n + 3 * r - 3)
        derived = enumerate_closure([pres.central(v) for v in _unit_vectors(pres)])
        assert len(derived) == want["derived"] == p ** (len(g.edges) + r - 1)
        exp = max(element_order(pres.element(a, z)) for a, z in elems)
        assert exp == (p ** r if p != 2 else 2 ** (r + 1))
        seen_primes.add(p)
    assert seen_primes == {2, 3, 5}
    assert time.time() - start < 120


def _unit_vectors(pres):
    k = len(pres.basis_orders)
    return [[1 if t == s else 0 for t in range(k)] for s in range(k)]


# ---------------------------------------------------------------- 5

@pytest.fixture(scope="module")
def net_suite():
    start = time.time()
    nets = nets_upto(8)
    res = {"nets": len(nets), "eta_bad": [], "deletions": 0, "deletion_bad": [], "signs": 0,
           "sign_bad": [], "anchors": 0, "anchor_bad": []}
    for g in nets:
        e = len(g.edges) - len(g.vertex_set) + 1
        if eta(g) != e or len(decompose_net(g)) != e:
            res["eta_bad"].append(g)
        if not g.is_cycle():
            for seg in maximal_segments(g):
                res["deletions"] += 1
                h = g.without_edges(segment_edges(seg))
                try:
                    ok = eta(h) == e - 1
                except PreconditionError:
                    ok = False
                if not ok:
                    res["deletion_bad"].append((g, seg))
        a = anchors(g)
        res["anchors"] += 1
        if not (is_admissible(g, a) and is_maximal_admissible(g, a)):
            res["anchor_bad"].append(g)
        if find_bad_cycles(g):
            continue
        for v in sorted(a):
            try:
                sigma = sign_function(g, a, v)
            except PreconditionError:
                continue
            res["signs"] += 1
            if sign_clause_violations(g, a, sigma):
                res["sign_bad"].append((g, v))
        fr = find_frame(g)
        if fr is not None:
            res["signs"] += 1
            if sign_clause_violations(g, fr.anchor, fr.sign):
                res["sign_bad"].append((g, "frame"))
    res["seconds"] = time.time() - start
    return res


def test_net_eta_signs_and_anchors(net_suite):
    assert net_suite["nets"] == 7661
    assert net_suite["eta_bad"] == []
    assert net_suite["signs"] > 50000 and net_suite["sign_bad"] == []
    assert net_suite["anchor_bad"] == []


def test_segment_deletion_failures_are_genuine(net_suite):
    # each failure leaves a graph that is not a net
    for g, seg in net_suite["deletion_bad"]:
        assert not is_net(g.without_edges(segment_edges(seg)))
    assert len(net_suite["deletion_bad"]) == 1460 and net_suite["deletions"] == 108590


@pytest.mark.criterion(5, "net, anchor and sign suites on all nets with at most 8 vertices")
@pytest.mark.xfail(strict=True, reason="deleting a maximal segment can leave a graph that is not a net")
def test_net_anchor_sign_suites(net_suite):
    print(f"{net_suite['nets']} nets, {net_suite['deletions']} deletions, {len(net_suite['deletion_bad'])} "
          f"leave a non-net, {net_suite['signs']} sign functions, {net_suite['seconds']:.1f}s")
    assert len(net_suite["eta_bad"]) == 0
    assert len(net_suite["sign_bad"]) == 0 and len(net_suite["anchor_bad"]) == 0
    assert net_suite["seconds"] < 120
    assert len(net_suite["deletion_bad"]) == 0


# ---------------------------------------------------------------- 6

def cycle_instances(count, rng, rings):
    for _ in range(count):
        ring = rng.choice(rings)
        n = rng.randint(4, 9)
        yield ring, n, random_weights(cycle_graph(n), ring, rng)


@pytest.fixture(scope="module")
def frame_graphs():
    bl = [g for g in connected_graphs(3, 7)
          if is_borderless(g)[0] and not find_bad_cycles(g) and not (g.is_cycle() and g.n == 3)]
    borderless = [(g, [u for u in sorted(g.vertex_set) if g.is_tree() or find_frame(g, u)]) for g in bl]
    borderless = [(g, us) for g, us in borderless if us]
    nets = [g for g in nets_upto(8) if not find_bad_cycles(g) and not (g.is_cycle() and g.n == 3)]
    nets = [(g, find_frame(g)) for g in nets]
    return borderless, [(g, fr) for g, fr in nets if fr is not None]


@pytest.mark.criterion(6, "construction clauses on 500 seeded instances per construction")
def test_construction_clause_fidelity(frame_graphs):
    start = time.time()
    rng = random.Random(SEED)
    done = dict.fromkeys(["cycle", "cycle_residue2", "net", "borderless"], 0)

    for ring, n, wg in cycle_instances(500, rng, [Z3, Z5, Z9]):
        r = rng.randint(2, n - 2)
        s = rng.randint(1, r - 1)
        a, c, b = rng.choice(units(ring)), rng.choice(units(ring)), rng.randrange(ring.modulus)
        lab = label_cycle(wg, s, r, a, b, c)
        assert verify_labeling(wg, lab)
        assert cycle_clause_violations(wg, lab, s, r, a, b, c) == []
        done["cycle"] += 1

    for ring, n, wg in cycle_instances(500, rng, [Z2, Z4]):
        r = rng.randint(2, n - 2)
        a = [rng.choice(units(ring)) for _ in range(4)]
        lab = label_cycle_residue2(wg, r, *a)
        assert verify_labeling(wg, lab)
        assert cycle_residue2_clause_violations(wg, lab, r, *a) == []
        done["cycle_residue2"] += 1

    borderless, nets = frame_graphs
    for _ in range(500):
        g, fr = rng.choice(nets)
        ring = rng.choice([Z3, Z5, Z9])
        wg = random_weights(g, ring, rng)
        s = rng.choice(sorted(v for v in fr.anchor if fr.sign[v] > 0))
        a, b = rng.choice(units(ring)), rng.randrange(ring.modulus)
        lab = label_net(wg, fr.anchor, fr.sign, s, a, b)
        assert verify_labeling(wg, lab)
        assert net_clause_violations(wg, lab, fr.sign, s, a, b) == []
        done["net"] += 1

    for _ in range(500):
        g, us = rng.choice(borderless)
        ring = rng.choice([Z3, Z5, Z9])
        wg = random_weights(g, ring, rng)
        u = rng.choice(us)
        anchor = g.vertex_set if g.is_tree() else find_frame(g, u).anchor
        a, b = ring(rng.randrange(ring.modulus)), ring(rng.choice(units(ring)))
        if rng.random() < 0.5:
            a, b = b, a
        lab = label_borderless(wg, anchor=anchor, u=u, a=a, b=b)
        assert verify_labeling(wg, lab)
        assert lab[u] == (a, b)
        assert all(lab[v][0].is_unit() or lab[v][1].is_unit() for v in anchor)
        done["borderless"] += 1

    assert all(k == 500 for k in done.values())
    assert time.time() - start < 180


# ---------------------------------------------------------------- 7

@pytest.mark.criterion(7, "bilinear attainable d-vectors equal the group commutator image")
def test_cross_module_equality():
    start = time.time()
    rng = random.Random(SEED)
    checked = 0
    for g in connected_graphs(2, 5):
        pres = group_from_graph(g, 3, 1)
        image = commutator_image(pres, budget=10**8)
        assert attainable_d_vectors(AlternatingMap.free_on(g, 3)) == image
        # a different basis of W gives the same coefficient vectors
        m = len(g.edges)
        while True:
            cols = [tuple(rng.randrange(3) for _ in range(m)) for _ in range(m)]
            if rank(cols, 3) == m:
                break
        other = AlternatingMap(3, g.n, m, dict(zip(g.sorted_edges(), cols)))
        assert attainable_d_vectors(other) == image
        checked += 1
    assert checked == len(connected_graphs(2, 5))
    assert time.time() - start < 60


# ---------------------------------------------------------------- 8

@pytest.mark.criterion(8, "residue field of size 2: conditions (i)+(ii) give labelings; fig5 and fig6 fail them")
def test_residue2_labelings():
    start = time.time()
    rng = random.Random(SEED)
    pool = [g for g in connected_graphs(3, 7)
            if not find_bad_cycles(g) and residue2_conditions(g).segment_condition]
    assert any(not g.is_tree() for g in pool)
    for k in range(100):
        ring = Z2 if k % 2 == 0 else Z4
        g = rng.choice(pool)
        wg = random_weights(g, ring, rng)
        out = label_general_residue2(wg)
        assert isinstance(out, Labeled) and verify_labeling(wg, out.labeling)
    fig5 = residue2_conditions(Graph.from_edges(FIG5_EDGES))
    assert not fig5.common_vertex
    fig6 = residue2_conditions(Graph.from_edges(FIG6_EDGES))
    assert fig6.common_vertex and not fig6.segment_condition
    assert time.time() - start < 120

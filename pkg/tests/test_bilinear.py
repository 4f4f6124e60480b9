import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from balance.bilinear import (AlternatingMap, BilinearError, FullImage, MissingElement, NotInImage, Unknown,
                              WNotSpanned, Witness, attainable_d_vectors, attainable_vectors, full_image_check,
                              image_membership, presentations, rank)
from balance.classify import ProximityReport, find_bad_cycles
from balance.figures import GAMMA4_EDGES
from balance.graph import Graph, cycle_graph
from balance.groups import commutator_image, group_from_graph

from conftest import connected_graphs

GAMMA4 = Graph.from_edges(GAMMA4_EDGES)
PATH_ORDER = [(1, 2), (2, 3), (3, 4), (1, 3)]


def in_sorted_order(bmap, by_edge):
    """Coordinates keyed by edge, rearranged into the map's coordinate order."""
    return tuple(by_edge.get(e, 0) for e in bmap.pairs)


def heisenberg(p):
    return AlternatingMap(p, 2, 1, {(1, 2): (1,)})


def test_structure_normalisation_and_errors():
    b = AlternatingMap(3, 2, 1, {(2, 1): (1,)})
    assert b.structure == {(1, 2): (2,)}
    with pytest.raises(WNotSpanned):
        AlternatingMap(3, 3, 2, {(1, 2): (1, 0), (2, 3): (2, 0)})
    with pytest.raises(BilinearError):
        AlternatingMap(3, 2, 1, {(1, 1): (1,)})
    with pytest.raises(BilinearError):
        AlternatingMap(4, 2, 1, {(1, 2): (1,)})
    assert rank([(1, 2), (2, 4)], 3) == 1 and rank([(1, 0), (0, 1)], 5) == 2


def test_json_round_trip():
    b = AlternatingMap.free_on(GAMMA4, 3)
    assert AlternatingMap.from_json(b.to_json()) == b


def test_membership_examples():
    for p in (3, 5):
        for w in range(p):
            out = image_membership(heisenberg(p), (w,))
            assert isinstance(out, Witness) and heisenberg(p).evaluate(out.u, out.v) == (w,)
    b = AlternatingMap.free_on(GAMMA4, 3)
    target = in_sorted_order(b, dict(zip(PATH_ORDER, (1, 0, 1, 0))))
    out = image_membership(b, target)
    assert isinstance(out, NotInImage) and isinstance(out.certificate, ProximityReport)
    assert target not in attainable_vectors(b)
    out = image_membership(b, (1, 1, 1, 1))
    assert isinstance(out, Witness) and b.evaluate(out.u, out.v) == (1, 1, 1, 1)
    with pytest.raises(BilinearError):
        image_membership(b, (1, 1))


def test_full_image_examples():
    b = AlternatingMap.free_on(GAMMA4, 3)
    miss = full_image_check(b)
    assert isinstance(miss, MissingElement)
    assert miss.w == in_sorted_order(b, dict(zip(PATH_ORDER, (1, 0, 1, 0))))
    assert isinstance(full_image_check(AlternatingMap.free_on(cycle_graph(4), 3)), FullImage)
    assert isinstance(full_image_check(heisenberg(3)), FullImage)
    assert isinstance(full_image_check(AlternatingMap.free_on(cycle_graph(4), 3), budget=10), Unknown)
    dependent = AlternatingMap(3, 3, 1, {(1, 2): (1,), (2, 3): (1,)})
    with pytest.raises(BilinearError):
        full_image_check(dependent)


def test_presentations_of_dependent_structure():
    b = AlternatingMap(3, 4, 1, {(1, 2): (1,), (1, 3): (1,), (1, 4): (1,), (2, 3): (1,)})
    ds = list(presentations(b, (1,)))
    assert len(ds) == 27 and all(sum(d.values()) % 3 == 1 for d in ds)
    with pytest.raises(BilinearError):
        list(presentations(b, (1,), cap=5))
    for w in range(3):
        out = image_membership(b, (w,))
        assert isinstance(out, Witness) and b.evaluate(out.u, out.v) == (w,)


def random_structure(rng, p):
    n = rng.randint(2, 4)
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    m = rng.randint(1, min(3, len(pairs)))
    while True:
        chosen = rng.sample(pairs, rng.randint(m, len(pairs)))
        struct = {e: tuple(rng.randrange(p) for _ in range(m)) for e in chosen}
        if rank(list(struct.values()), p) == m:
            return AlternatingMap(p, n, m, struct)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9))
def test_membership_matches_enumeration(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5])
    b = random_structure(rng, p)
    image = attainable_vectors(b)
    w = tuple(rng.randrange(p) for _ in range(b.m))
    out = image_membership(b, w)
    if isinstance(out, Witness):
        assert b.evaluate(out.u, out.v) == w
    assert isinstance(out, Witness) == (w in image)
    assert not isinstance(out, Unknown)
    if p == 2 and isinstance(out, Witness):
        assert out.route in ("zero", "search")


def test_agrees_with_group_image():
    for g in connected_graphs(2, 4):
        if g.vertex_set != set(range(1, g.n + 1)):
            continue
        b = AlternatingMap.free_on(g, 3)
        assert attainable_d_vectors(b) == commutator_image(group_from_graph(g, 3, 1))


def test_full_image_matches_enumeration_on_small_graphs():
    for g in connected_graphs(2, 5):
        if g.vertex_set != set(range(1, g.n + 1)):
            continue
        b = AlternatingMap.free_on(g, 3)
        full = len(attainable_vectors(b)) == 3 ** b.m
        out = full_image_check(b)
        assert isinstance(out, FullImage) == full
        if isinstance(out, MissingElement):
            assert out.w not in attainable_vectors(b)
        if find_bad_cycles(g):
            assert not full

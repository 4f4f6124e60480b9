import random
from functools import lru_cache

import networkx as nx
import pytest
from networkx.generators.atlas import graph_atlas_g

from balance.graph import Graph, WeightedGraph
from balance.ring import RingSpec


@lru_cache(maxsize=None)
def connected_graphs(min_n, max_n):
    """All connected graphs on min_n..max_n vertices up to isomorphism, vertices 1..n."""
    out = []
    for h in graph_atlas_g():
        n = h.number_of_nodes()
        if min_n <= n <= max_n and h.number_of_edges() and nx.is_connected(h):
            out.append(Graph.from_edges([(u + 1, v + 1) for u, v in h.edges()], n))
    return tuple(out)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(g.vertex_set)
    h.add_edges_from(g.edges)
    return h


def random_weights(g, ring, rng, unit_bias=0.0):
    out = {}
    for e in g.sorted_edges():
        if unit_bias and rng.random() < unit_bias:
            out[e] = rng.choice([v for v in range(ring.modulus) if v % ring.p])
        else:
            out[e] = rng.randrange(ring.modulus)
    return WeightedGraph.build(ring, out, g.n)


@pytest.fixture
def rng():
    return random.Random(20240607)


@pytest.fixture
def z3():
    return RingSpec(3)


@lru_cache(maxsize=None)
def nets_upto(nmax):
    """Every net on at most nmax vertices up to isomorphism, grown from cycles by
    gluing paths between two distinct existing vertices (the constructive definition)."""
    import itertools

    import pynauty

    def cert(n, edges):
        adj = {v: [] for v in range(n)}
        for u, v in edges:
            adj[u].append(v)
        return n, pynauty.certificate(pynauty.Graph(n, adjacency_dict=adj))

    seen, out, frontier = set(), [], []
    for k in range(3, nmax + 1):
        e = frozenset((min(i, (i + 1) % k), max(i, (i + 1) % k)) for i in range(k))
        seen.add(cert(k, e))
        out.append((k, e))
        frontier.append((k, e))
    while frontier:
        nxt = []
        for n, edges in frontier:
            for u, v in itertools.combinations(range(n), 2):
                for t in range(nmax - n + 1):
                    if t == 0 and (u, v) in edges:
                        continue
                    path = [u] + list(range(n, n + t)) + [v]
                    new = frozenset(edges | {(min(a, b), max(a, b)) for a, b in zip(path, path[1:])})
                    key = cert(n + t, new)
                    if key not in seen:
                        seen.add(key)
                        out.append((n + t, new))
                        nxt.append((n + t, new))
        frontier = nxt
    return tuple(Graph.from_edges([(u + 1, v + 1) for u, v in e], n) for n, e in out)


# ---------------------------------------------------------------- acceptance reporting

_criteria = {}
_setup_time = pytest.StashKey[float]()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "setup":
        item.stash[_setup_time] = rep.duration
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        passed = rep.passed and not hasattr(rep, "wasxfail")
        _criteria[number] = (title, passed, rep.duration + (item.stash.get(_setup_time, 0.0) if rep.when == "call" else 0.0))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, passed, secs = _criteria[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number}: {title} ({secs:.1f}s)")

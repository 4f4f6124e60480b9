"""Simple graphs, weighted graphs and the path/cycle/segment machinery."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .ring import RingElem, RingError, RingSpec

Edge = Tuple[int, int]
Cycle = Tuple[int, ...]
Segment = Tuple[int, ...]

DEFAULT_CYCLE_BUDGET = 10**6


class GraphError(ValueError):
    pass


class CycleBudgetExceeded(RuntimeError):
    def __init__(self, budget: int):
        super().__init__(f"more than {budget} simple cycles (CycleBudgetExceeded, budget={budget})")
        self.budget = budget


class ParseError(GraphError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


def edge_key(i: int, j: int) -> Edge:
    if i == j:
        raise GraphError(f"loop at vertex {i}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on an explicit vertex set (default 1..n)."""

    n: int
    edges: FrozenSet[Edge]
    vertex_set: Optional[FrozenSet[int]] = None
    _adj: Dict[int, Tuple[int, ...]] = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        edges = frozenset(edge_key(i, j) for i, j in self.edges)
        object.__setattr__(self, "edges", edges)
        verts = frozenset(range(1, self.n + 1)) if self.vertex_set is None else frozenset(self.vertex_set)
        object.__setattr__(self, "vertex_set", verts)
        for i, j in edges:
            if i not in verts or j not in verts:
                raise GraphError(f"edge {i}-{j} uses a vertex outside the graph")
        adj: Dict[int, List[int]] = {v: [] for v in verts}
        for i, j in edges:
            adj[i].append(j)
            adj[j].append(i)
        object.__setattr__(self, "_adj", {v: tuple(sorted(ns)) for v, ns in adj.items()})

    @classmethod
    def from_edges(cls, edges: Iterable[Tuple[int, int]], n: Optional[int] = None) -> "Graph":
        edges = [edge_key(i, j) for i, j in edges]
        if n is None:
            n = max((j for _, j in edges), default=0)
        return cls(n, frozenset(edges))

    @property
    def vertices(self) -> List[int]:
        return sorted(self.vertex_set)

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and edge_key(u, v) in self.edges

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def components(self) -> List[List[int]]:
        seen, comps = set(), []
        for s in self.vertices:
            if s in seen:
                continue
            comp, stack = [], [s]
            seen.add(s)
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self._adj[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.vertex_set) > 0 and len(self.components()) == 1

    def subgraph(self, vertices: Iterable[int]) -> "Graph":
        vs = frozenset(vertices)
        return Graph(self.n, frozenset(e for e in self.edges if e[0] in vs and e[1] in vs), vs)

    def edge_subgraph(self, edges: Iterable[Edge]) -> "Graph":
        es = frozenset(edge_key(*e) for e in edges)
        vs = frozenset(v for e in es for v in e)
        return Graph(self.n, es, vs)

    def without_edges(self, edges: Iterable[Edge], drop_isolated: bool = True) -> "Graph":
        gone = {edge_key(*e) for e in edges}
        es = self.edges - gone
        if drop_isolated:
            vs = frozenset(v for e in es for v in e)
        else:
            vs = self.vertex_set
        return Graph(self.n, es, vs)

    def with_pendants(self, at: Iterable[int]) -> "Graph":
        """Attach a fresh pendant neighbour to every vertex in `at`."""
        es, vs, nxt = set(self.edges), set(self.vertex_set), self.n
        for v in sorted(at):
            nxt += 1
            es.add((v, nxt))
            vs.add(nxt)
        return Graph(nxt, frozenset(es), frozenset(vs))

    def is_cycle(self) -> bool:
        return (self.is_connected() and len(self.vertex_set) >= 3
                and all(len(ns) == 2 for ns in self._adj.values()))

    def is_tree(self) -> bool:
        return self.is_connected() and len(self.edges) == len(self.vertex_set) - 1


def path_graph(k: int) -> Graph:
    return Graph.from_edges([(i, i + 1) for i in range(1, k)], k)


def cycle_graph(k: int) -> Graph:
    return Graph.from_edges([(i, i % k + 1) for i in range(1, k + 1)], k)


def complete_graph(k: int) -> Graph:
    return Graph.from_edges([(i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1)], k)


def wedge_renaming(g1: Graph, g2: Graph, v: int, w: int) -> Dict[int, int]:
    """Vertex map used by wedge_sum: w goes to v, the rest of g2 is numbered after g1."""
    if v not in g1.vertex_set:
        raise GraphError(f"vertex {v} not in first graph")
    if w not in g2.vertex_set:
        raise GraphError(f"vertex {w} not in second graph")
    rename = {}
    nxt = g1.n
    for u in g2.vertices:
        if u == w:
            rename[u] = v
        else:
            nxt += 1
            rename[u] = nxt
    return rename


def wedge_sum(g1: Graph, g2: Graph, v: int, w: int) -> Graph:
    """Glue g2 onto g1 by identifying w with v; g2's other vertices are renumbered after g1's."""
    rename = wedge_renaming(g1, g2, v, w)
    edges = set(g1.edges) | {edge_key(rename[a], rename[b]) for a, b in g2.edges}
    verts = set(g1.vertex_set) | set(rename.values())
    return Graph(max([g1.n] + list(rename.values())), frozenset(edges), frozenset(verts))


def canonical_cycle(seq: Iterable[int]) -> Cycle:
    """Lexicographically least rotation/reflection of a cyclic vertex sequence."""
    seq = list(seq)
    best = None
    k = len(seq)
    for rot in (seq, seq[::-1]):
        for i in range(k):
            cand = tuple(rot[i:] + rot[:i])
            if best is None or cand < best:
                best = cand
    return best


def cycle_edges(c: Cycle) -> List[Edge]:
    return [edge_key(c[i], c[(i + 1) % len(c)]) for i in range(len(c))]


def simple_cycles(g: Graph, budget: int = DEFAULT_CYCLE_BUDGET) -> List[Cycle]:
    """All simple cycles, each in canonical form, sorted.

    Backtracking from each start vertex s over vertices larger than s; a cycle is
    kept in the orientation whose second vertex is smaller than its last, which
    is exactly the canonical form.
    """
    out: List[Cycle] = []
    adj = g._adj
    for s in g.vertices:
        path = [s]
        on_path = {s}
        stack = [iter(w for w in adj[s] if w > s)]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            path.append(nxt)
            on_path.add(nxt)
            for w in adj[nxt]:
                if w == s and len(path) >= 3 and path[1] < path[-1]:
                    out.append(tuple(path))
                    if len(out) > budget:
                        raise CycleBudgetExceeded(budget)
            stack.append(iter(w for w in adj[nxt] if w > s and w not in on_path))
        # path is back to [] here
    out.sort(key=lambda c: (len(c), c))
    return out


class Segments(list):
    """List of maximal segments carrying an optional note (e.g. "IsCycle")."""

    note: Optional[str] = None


def maximal_segments(g: Graph, degree: Optional[Mapping[int, int]] = None) -> Segments:
    """Maximal segments of g, each oriented so that it reads lexicographically smaller.

    `degree` overrides the degrees used to decide which vertices are interior
    (used when g is a block of a larger host graph). A cycle hanging on a single
    branch vertex comes out as a closed segment b..b so that every edge lies in
    exactly one segment.
    """
    deg = {v: g.degree(v) for v in g.vertex_set} if degree is None else degree
    segs = Segments()
    if all(deg[v] == 2 for v in g.vertex_set):
        segs.note = "IsCycle"
        return segs
    used = set()
    for u in g.vertices:
        if deg[u] == 2:
            continue
        for v in g.neighbors(u):
            if edge_key(u, v) in used:
                continue
            path = [u, v]
            used.add(edge_key(u, v))
            prev, cur = u, v
            while deg[cur] == 2 and cur != u:
                nxt = [x for x in g.neighbors(cur) if x != prev]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
                used.add(edge_key(prev, cur))
                path.append(cur)
            seg = tuple(path)
            if seg[::-1] < seg:
                seg = seg[::-1]
            segs.append(seg)
    segs.sort()
    return segs


def segment_edges(seg: Segment) -> List[Edge]:
    return [edge_key(a, b) for a, b in zip(seg, seg[1:])]


def blocks(g: Graph) -> Tuple[List[FrozenSet[Edge]], List[int]]:
    """Biconnected components (as edge sets) and articulation points.

    Iterative Hopcroft-Tarjan lowpoint search.
    """
    index: Dict[int, int] = {}
    low: Dict[int, int] = {}
    comps: List[FrozenSet[Edge]] = []
    cut = set()
    counter = 0
    for root in g.vertices:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        estack: List[Edge] = []
        stack = [(root, None, iter(g.neighbors(root)))]
        root_children = 0
        while stack:
            u, parent, it = stack[-1]
            w = next(it, None)
            if w is None:
                stack.pop()
                if parent is not None:
                    low[parent] = min(low[parent], low[u])
                    if low[u] >= index[parent]:
                        if parent != root:
                            cut.add(parent)
                        comp = set()
                        while estack:
                            e = estack.pop()
                            comp.add(e)
                            if e == edge_key(parent, u):
                                break
                        comps.append(frozenset(comp))
                continue
            if w == parent:
                continue
            if w not in index:
                index[w] = low[w] = counter
                counter += 1
                estack.append(edge_key(u, w))
                if u == root:
                    root_children += 1
                stack.append((w, u, iter(g.neighbors(w))))
            elif index[w] < index[u]:
                low[u] = min(low[u], index[w])
                estack.append(edge_key(u, w))
        if root_children > 1:
            cut.add(root)
    comps.sort(key=lambda c: sorted(c))
    return comps, sorted(cut)


def is_biconnected(g: Graph) -> bool:
    if len(g.vertex_set) < 3 or not g.is_connected():
        return False
    comps, _ = blocks(g)
    return len(comps) == 1


@dataclass(frozen=True)
class WeightedGraph:
    """The graph of a balance system: each edge carries a ring weight (0 is a genuine weight)."""

    ring: RingSpec
    base: Graph
    weight: Mapping[Edge, RingElem]

    def __post_init__(self):
        w = {}
        for e, val in dict(self.weight).items():
            key = edge_key(*e)
            if not isinstance(val, RingElem):
                val = self.ring(int(val))
            elif val.spec != self.ring:
                raise GraphError(f"weight on {key} lives in {val.spec}, not {self.ring}")
            w[key] = val
        if set(w) != set(self.base.edges):
            raise GraphError("every edge needs exactly one weight")
        object.__setattr__(self, "weight", w)
        verts = frozenset(v for e in self.base.edges for v in e)
        if verts != self.base.vertex_set:
            object.__setattr__(self, "base", Graph(self.base.n, self.base.edges, verts))

    @classmethod
    def build(cls, ring: RingSpec, weights: Mapping[Tuple[int, int], int], n: Optional[int] = None) -> "WeightedGraph":
        g = Graph.from_edges(weights.keys(), n)
        return cls(ring, g, {edge_key(*e): ring(int(v)) for e, v in weights.items()})

    @property
    def vertices(self) -> List[int]:
        return self.base.vertices

    def w(self, u: int, v: int) -> RingElem:
        """Oriented weight: the right-hand side of alpha_u*beta_v - alpha_v*beta_u."""
        d = self.weight[edge_key(u, v)]
        return d if u < v else -d

    def restrict(self, vertices: Iterable[int]) -> "WeightedGraph":
        sub = self.base.subgraph(vertices)
        return WeightedGraph(self.ring, sub, {e: self.weight[e] for e in sub.edges})

    def restrict_edges(self, edges: Iterable[Edge]) -> "WeightedGraph":
        sub = self.base.edge_subgraph(edges)
        return WeightedGraph(self.ring, sub, {e: self.weight[e] for e in sub.edges})


# ---------------------------------------------------------------- text / json formats

def format_graph(g: Graph, weights: Optional[Mapping[Edge, RingElem]] = None,
                 ring: Optional[RingSpec] = None) -> str:
    lines = [f"graph {g.n}"]
    if weights is not None:
        lines.append(f"ring {ring}")
    for i, j in g.sorted_edges():
        if weights is None:
            lines.append(f"e {i} {j}")
        else:
            lines.append(f"e {i} {j} {int(weights[(i, j)])}")
    return "\n".join(lines) + "\n"


def format_weighted(wg: WeightedGraph) -> str:
    return format_graph(wg.base, wg.weight, wg.ring)


def parse_graph_text(text: str):
    """Parse the line format; returns a Graph, or a WeightedGraph when weights are present."""
    n = None
    ring = None
    edges: Dict[Edge, Optional[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        toks = line.split()
        col = raw.index(toks[0]) + 1
        head = toks[0]
        if head == "graph":
            if n is not None:
                raise ParseError("duplicate graph header", lineno, col)
            if len(toks) != 2 or not toks[1].isdigit():
                raise ParseError("expected 'graph <n>'", lineno, col)
            n = int(toks[1])
        elif head == "ring":
            try:
                ring = RingSpec.parse(" ".join(toks[1:]))
            except RingError as exc:
                raise ParseError(str(exc), lineno, raw.index(toks[1]) + 1 if len(toks) > 1 else col) from exc
        elif head == "e":
            if n is None:
                raise ParseError("edge before 'graph <n>' header", lineno, col)
            if len(toks) not in (3, 4):
                raise ParseError("expected 'e <i> <j> [<weight>]'", lineno, col)
            try:
                vals = [int(t) for t in toks[1:]]
            except ValueError:
                bad = next(t for t in toks[1:] if not t.lstrip("-").isdigit())
                raise ParseError(f"not an integer: {bad!r}", lineno, raw.index(bad, col) + 1)
            i, j = vals[0], vals[1]
            for t, v in zip(toks[1:3], (i, j)):
                if not 1 <= v <= n:
                    raise ParseError(f"vertex {v} out of range 1..{n}", lineno, raw.index(t, col) + 1)
            if i == j:
                raise ParseError("loops are not allowed", lineno, col)
            key = edge_key(i, j)
            if key in edges:
                raise ParseError(f"duplicate edge {key[0]}-{key[1]}", lineno, col)
            edges[key] = vals[2] if len(vals) == 3 else None
        else:
            raise ParseError(f"unknown record {head!r}", lineno, col)
    if n is None:
        raise ParseError("missing 'graph <n>' header", 1, 1)
    weighted = [w is not None for w in edges.values()]
    if any(weighted) and not all(weighted):
        raise ParseError("either every edge or no edge carries a weight", 1, 1)
    g = Graph(n, frozenset(edges))
    if edges and all(weighted):
        if ring is None:
            raise ParseError("weights present but no 'ring Z/p^k' line", 1, 1)
        return WeightedGraph(ring, g, {e: ring(w) for e, w in edges.items()})
    return g


def graph_to_json(g) -> dict:
    if isinstance(g, WeightedGraph):
        return {"n": g.base.n, "ring": str(g.ring),
                "edges": [{"i": i, "j": j, "w": int(g.weight[(i, j)])} for i, j in g.base.sorted_edges()]}
    return {"n": g.n, "edges": [{"i": i, "j": j} for i, j in g.sorted_edges()]}


def graph_from_json(data) -> object:
    if isinstance(data, str):
        data = json.loads(data)
    n = int(data["n"])
    edges = [(int(e["i"]), int(e["j"])) for e in data["edges"]]
    g = Graph(n, frozenset(edge_key(*e) for e in edges))
    if data.get("ring") is not None and any("w" in e for e in data["edges"]):
        ring = RingSpec.parse(data["ring"])
        return WeightedGraph(ring, g, {edge_key(int(e["i"]), int(e["j"])): ring(int(e["w"])) for e in data["edges"]})
    return g


def load_graph(text: str):
    """Accept either the line format or the JSON mirror."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return graph_from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad graph JSON: {exc}", 1, 1) from exc
    return parse_graph_text(text)

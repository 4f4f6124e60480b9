"""Gluing sequences for borderless graphs and ear sequences for nets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .classify import PreconditionError, find_bad_cycles, is_borderless, is_net
from .graph import Edge, Graph, Segment, blocks, canonical_cycle, edge_key, is_biconnected


@dataclass(frozen=True)
class Piece:
    kind: str  # "tree" or "cycle"
    edges: FrozenSet[Edge]

    @property
    def vertices(self) -> FrozenSet[int]:
        return frozenset(v for e in self.edges for v in e)


@dataclass(frozen=True)
class BorderlessDecomposition:
    first: Piece
    # (piece, glue vertex); vertex ids are shared, so the glue vertex names both sides
    steps: Tuple[Tuple[Piece, int], ...]

    def __len__(self) -> int:
        return 1 + len(self.steps)

    def replay(self) -> Graph:
        edges = set(self.first.edges)
        verts = set(self.first.vertices)
        for piece, v in self.steps:
            if piece.vertices & verts != {v}:
                raise PreconditionError(f"piece does not meet the accumulated graph exactly at {v}")
            edges |= piece.edges
            verts |= piece.vertices
        return Graph.from_edges(edges)


def decompose_borderless(g: Graph) -> BorderlessDecomposition:
    """Split a cactus into maximal trees of bridges and its cycles, glued in BFS order."""
    ok, _ = is_borderless(g)
    if not ok:
        raise PreconditionError("graph is not borderless")
    comps, _ = blocks(g)
    pieces: List[Piece] = [Piece("cycle", frozenset(c)) for c in comps if len(c) > 1]
    bridges = [next(iter(c)) for c in comps if len(c) == 1]
    if bridges:
        forest = Graph.from_edges(bridges)
        for comp in forest.components():
            if len(comp) > 1:
                pieces.append(Piece("tree", frozenset(e for e in bridges if e[0] in comp)))
    if not pieces:
        raise PreconditionError("graph has no edges")
    pieces.sort(key=lambda p: sorted(p.vertices))
    first = pieces[0]
    covered = set(first.vertices)
    rest = pieces[1:]
    steps = []
    while rest:
        for i, p in enumerate(rest):
            shared = p.vertices & covered
            if shared:
                (v,) = shared
                steps.append((p, v))
                covered |= p.vertices
                del rest[i]
                break
        else:
            raise PreconditionError("pieces do not form a connected gluing")
    return BorderlessDecomposition(first, tuple(steps))


@dataclass(frozen=True)
class NetDecomposition:
    base: Tuple[int, ...]
    segments: Tuple[Segment, ...]
    anchor_aware: bool = False

    def __len__(self) -> int:
        return 1 + len(self.segments)

    def replay(self) -> Graph:
        b = self.base
        edges = {edge_key(b[i], b[(i + 1) % len(b)]) for i in range(len(b))}
        verts = set(b)
        for seg in self.segments:
            if seg[0] == seg[-1] or seg[0] not in verts or seg[-1] not in verts:
                raise PreconditionError(f"segment {seg} is not glued to two distinct old vertices")
            if any(v in verts for v in seg[1:-1]):
                raise PreconditionError(f"segment {seg} reuses an old vertex")
            edges |= {edge_key(seg[i], seg[i + 1]) for i in range(len(seg) - 1)}
            verts |= set(seg)
        return Graph.from_edges(edges)


def _candidate_ears(h: Graph) -> List[Segment]:
    branch = {v for v in h.vertex_set if h.degree(v) != 2}
    out = []
    seen = set()
    for b in sorted(branch):
        for nb in h.neighbors(b):
            path = [b, nb]
            while path[-1] not in branch:
                nxt = [x for x in h.neighbors(path[-1]) if x != path[-2]][0]
                path.append(nxt)
            key = frozenset(edge_key(path[i], path[i + 1]) for i in range(len(path) - 1))
            if path[0] == path[-1] or key in seen:
                continue
            seen.add(key)
            out.append(tuple(path) if path[0] < path[-1] else tuple(reversed(path)))
    out.sort(key=lambda s: (sorted(s), s))
    return out


def _keeps_net(h: Graph, ear: Segment) -> bool:
    rest = h.without_edges(edge_key(ear[i], ear[i + 1]) for i in range(len(ear) - 1))
    return rest.is_cycle() or is_biconnected(rest)


def _ears(h: Graph) -> List[Segment]:
    """Maximal segments of h with distinct ends whose removal keeps h 2-connected."""
    return [ear for ear in _candidate_ears(h) if _keeps_net(h, ear)]


def _cycle_order(h: Graph) -> Tuple[int, ...]:
    start = h.vertices[0]
    order = [start]
    prev, cur = None, start
    while True:
        nxt = [x for x in h.neighbors(cur) if x != prev]
        prev, cur = cur, min(nxt) if len(order) == 1 else nxt[0]
        if cur == start:
            break
        order.append(cur)
    return canonical_cycle(order)


def decompose_net(g: Graph, anchor: Optional[Iterable[int]] = None, max_states: int = 10**5) -> NetDecomposition:
    """Peel ears (lexicographically smallest vertex set first) down to a base cycle.

    With an anchor, a backtracking search looks for an order where the base
    cycle holds exactly two non-anchor points and every segment interior one
    or two.
    """
    if not is_net(g):
        raise PreconditionError("graph is not a net")
    if anchor is None:
        h = g
        segs: List[Segment] = []
        while not h.is_cycle():
            ear = next(e for e in _candidate_ears(h) if _keeps_net(h, e))
            segs.append(ear)
            h = h.without_edges(edge_key(ear[i], ear[i + 1]) for i in range(len(ear) - 1))
        return NetDecomposition(_cycle_order(h), tuple(reversed(segs)))
    if find_bad_cycles(g):
        raise PreconditionError("anchor-aware decomposition requested on a graph with bad cycles")
    if g.is_cycle() and len(g.vertex_set) == 3:
        raise PreconditionError("anchor-aware decomposition requested on a triangle")
    outside = g.vertex_set - set(anchor)
    dead = set()

    def go(h: Graph) -> Optional[List[Segment]]:
        if h.is_cycle():
            return [] if len(outside & h.vertex_set) == 2 else None
        key = frozenset(h.edges)
        if key in dead or len(dead) > max_states:
            return None
        for ear in _ears(h):
            k = len(outside & set(ear[1:-1]))
            if k not in (1, 2):
                continue
            rest = h.without_edges(edge_key(ear[i], ear[i + 1]) for i in range(len(ear) - 1))
            sub = go(rest)
            if sub is not None:
                return sub + [ear]
        dead.add(key)
        return None

    order = go(g)
    if order is None:
        raise PreconditionError("no decomposition with one or two non-anchor points per step")
    h = g
    for ear in order:
        h = h.without_edges(edge_key(ear[i], ear[i + 1]) for i in range(len(ear) - 1))
    return NetDecomposition(_cycle_order(h), tuple(order), anchor_aware=True)

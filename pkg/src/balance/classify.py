"""Recognisers for the graph classes and certificates used by the labeling constructions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .graph import (DEFAULT_CYCLE_BUDGET, Cycle, Edge, Graph, GraphError, WeightedGraph, blocks,
                    cycle_edges, edge_key, is_biconnected, maximal_segments, segment_edges,
                    simple_cycles)


class PreconditionError(ValueError):
    pass


# ---------------------------------------------------------------- bad cycles and proximities

@dataclass(frozen=True)
class BadCycleReport:
    cycle: Cycle
    low_degree_pair: Tuple[int, int]
    # cycle rotated to u_1..u_r with (u_{r-1}, u_r) the low-degree pair
    layout: Tuple[int, ...]


@dataclass(frozen=True)
class ProximityReport:
    cycle: Tuple[int, ...]
    attachments: Tuple[Tuple[int, int], ...]

    def as_dict(self) -> dict:
        return {"cycle": list(self.cycle),
                "attachments": {str(u): a for u, a in self.attachments}}


def _bad_layout(c: Cycle, deg: Mapping[int, int]) -> Optional[Tuple[int, ...]]:
    r = len(c)
    low = [i for i, v in enumerate(c) if deg[v] == 2]
    if len(low) != 2 or any(deg[v] < 2 for v in c):
        return None
    i, j = low
    if (j - i) % r == 1:
        start = j + 1
    elif (i - j) % r == 1:
        start = i + 1
    else:
        return None
    fwd = tuple(c[(start + t) % r] for t in range(r))
    # the reflection keeping the low pair at the end
    high = fwd[:r - 2][::-1]
    bwd = high + (fwd[r - 1], fwd[r - 2])
    return min(fwd, bwd)


def bad_cycles_from(cycles: Iterable[Cycle], deg: Mapping[int, int]) -> List[BadCycleReport]:
    out = []
    for c in cycles:
        lay = _bad_layout(c, deg)
        if lay is not None:
            out.append(BadCycleReport(c, tuple(sorted(lay[-2:])), lay))
    return out


def find_bad_cycles(g: Graph, budget: int = DEFAULT_CYCLE_BUDGET) -> List[BadCycleReport]:
    """Cycles whose vertices all have degree > 2 except two adjacent vertices of degree 2."""
    deg = {v: g.degree(v) for v in g.vertex_set}
    return bad_cycles_from(simple_cycles(g, budget), deg)


def _proximities(wg: WeightedGraph, report: BadCycleReport, p: int) -> Iterator[ProximityReport]:
    lay = report.layout
    r = len(lay)
    on_cycle = set(lay)
    res = lambda u, v: wg.weight[edge_key(u, v)].value % p
    chain = [(lay[i], lay[i + 1]) for i in range(r - 2)] + [(lay[0], lay[r - 1])]
    if any(res(u, v) != 0 for u, v in chain) or res(lay[r - 2], lay[r - 1]) == 0:
        return
    options = []
    for u in lay[:r - 2]:
        cands = [a for a in wg.base.neighbors(u) if a not in on_cycle and res(u, a) != 0]
        if not cands:
            return
        options.append(cands)
    for combo in itertools.product(*options):
        yield ProximityReport(lay, tuple(zip(lay[:r - 2], combo)))


def find_unfavorable_proximities(wg: WeightedGraph, budget: int = DEFAULT_CYCLE_BUDGET,
                                 first_only: bool = False) -> List[ProximityReport]:
    """All unfavorable proximities, every attachment choice enumerated.

    Zero residue on every cycle edge except the one joining the two degree-2
    vertices, nonzero residue on that edge and on each attachment edge.
    """
    out = []
    for rep in find_bad_cycles(wg.base, budget):
        for prox in _proximities(wg, rep, wg.ring.p):
            out.append(prox)
            if first_only:
                return out
            if len(out) > budget:
                raise GraphError(f"more than {budget} proximities")
    return out


def check_unfavorable(wg: WeightedGraph, prox: ProximityReport) -> bool:
    """Re-check a certificate against the graph and the residue pattern."""
    p = wg.ring.p
    lay = prox.cycle
    r = len(lay)
    g = wg.base
    if r < 3 or len(set(lay)) != r:
        return False
    if not all(g.has_edge(lay[i], lay[(i + 1) % r]) for i in range(r)):
        return False
    if [g.degree(v) for v in lay[r - 2:]] != [2, 2] or any(g.degree(v) <= 2 for v in lay[:r - 2]):
        return False
    res = lambda u, v: wg.weight[edge_key(u, v)].value % p
    if any(res(lay[i], lay[i + 1]) for i in range(r - 2)) or res(lay[0], lay[-1]):
        return False
    if res(lay[-2], lay[-1]) == 0:
        return False
    att = dict(prox.attachments)
    if sorted(att) != sorted(lay[:r - 2]):
        return False
    return all(a not in lay and g.has_edge(u, a) and res(u, a) for u, a in att.items())


# ---------------------------------------------------------------- borderless graphs and nets

def is_borderless(g: Graph, budget: int = DEFAULT_CYCLE_BUDGET) -> Tuple[bool, Optional[Tuple[Cycle, Cycle]]]:
    """Cactus test via blocks: every block is a single edge or a single cycle.

    On failure the witness is a pair of simple cycles sharing at least two vertices.
    """
    if not g.is_connected():
        raise PreconditionError("graph is not connected")
    comps, _ = blocks(g)
    for comp in comps:
        verts = {v for e in comp for v in e}
        if len(comp) > 1 and len(comp) != len(verts):
            cyc = simple_cycles(g.edge_subgraph(comp), budget)
            for a, b in itertools.combinations(cyc, 2):
                if len(set(a) & set(b)) >= 2:
                    return False, (a, b)
    return True, None


def is_net(g: Graph) -> bool:
    """A net is a cycle grown by gluing segments between distinct existing vertices.

    Those are exactly the 2-connected graphs (open ear decompositions), which is
    what is tested here.
    """
    return g.is_cycle() or is_biconnected(g)


def satisfies_net_conditions(g: Graph, budget: int = DEFAULT_CYCLE_BUDGET) -> bool:
    """The three-condition test: >= 2 cycles, every edge on a cycle, every cycle
    shares a maximal segment with another cycle.

    Every net with at least two cycles passes, but a few non-nets pass as well,
    so is_net does not use it.
    """
    cyc = simple_cycles(g, budget)
    if len(cyc) < 2:
        return False
    cedges = [set(cycle_edges(c)) for c in cyc]
    if set(g.edges) - set().union(*cedges):
        return False
    segs = [set(segment_edges(s)) for s in maximal_segments(g)]
    for i, ce in enumerate(cedges):
        if not any(j != i and any(s <= ce and s <= cedges[j] for s in segs) for j in range(len(cyc))):
            return False
    return True


def eta(g: Graph) -> int:
    if not is_net(g):
        raise PreconditionError("eta is only defined on nets")
    return len(g.edges) - len(g.vertex_set) + 1


# ---------------------------------------------------------------- admissible sets and anchors

def on_some_cycle(g: Graph) -> FrozenSet[int]:
    comps, _ = blocks(g)
    return frozenset(v for c in comps if len(c) > 1 for e in c for v in e)


def forced_anchor_points(g: Graph) -> FrozenSet[int]:
    """Vertices that lie in every anchor: degree != 2, or on no cycle."""
    cyc = on_some_cycle(g)
    return frozenset(v for v in g.vertex_set if g.degree(v) != 2 or v not in cyc)


class _Admissibility:
    """Admissibility tests sharing one cycle enumeration (pendants add no cycles)."""

    def __init__(self, g: Graph, budget: int = DEFAULT_CYCLE_BUDGET):
        self.g = g
        self.cycles = simple_cycles(g, budget)
        self.base_deg = {v: g.degree(v) for v in g.vertex_set}

    def __call__(self, w: Iterable[int]) -> bool:
        deg = dict(self.base_deg)
        for v in w:
            deg[v] += 1
        return not any(_bad_layout(c, deg) is not None for c in self.cycles)


def is_admissible(g: Graph, w: Iterable[int], budget: int = DEFAULT_CYCLE_BUDGET) -> bool:
    return _Admissibility(g, budget)(w)


def anchors(g: Graph, budget: int = DEFAULT_CYCLE_BUDGET) -> FrozenSet[int]:
    """Canonical anchor: grow the forced set greedily in index order until no
    single vertex can be added without creating a bad cycle."""
    test = _Admissibility(g, budget)
    forced = forced_anchor_points(g)
    cur = set(forced)
    if not test(cur):
        # the forced points reproduce a bad cycle of g; take the maximal admissible
        # set covering the most forced points instead
        try:
            options = anchors_all(g)
        except GraphError as exc:
            raise PreconditionError(f"graph has a bad cycle and is too large for exhaustive anchors: {exc}")
        return min(options, key=lambda a: (-len(a & forced), sorted(a)))
    changed = True
    while changed:
        changed = False
        for v in g.vertices:
            if v not in cur and test(cur | {v}):
                cur.add(v)
                changed = True
    return frozenset(cur)


def anchors_all(g: Graph, budget: int = 1 << 16) -> List[FrozenSet[int]]:
    """Every inclusion-maximal admissible set, by exhaustive search over subsets."""
    test = _Admissibility(g)
    verts = g.vertices
    if 2 ** len(verts) > budget:
        raise GraphError(f"2^{len(verts)} subsets exceed the budget {budget}")
    adm = [frozenset(s) for k in range(len(verts) + 1)
           for s in itertools.combinations(verts, k) if test(s)]
    return sorted((a for a in adm if not any(a < b for b in adm)), key=sorted)


def is_maximal_admissible(g: Graph, w: Iterable[int]) -> bool:
    test = _Admissibility(g)
    w = set(w)
    return test(w) and all(not test(w | {v}) for v in g.vertex_set - w)


# ---------------------------------------------------------------- sign functions

def sign_clause_violations(g: Graph, anchor: Iterable[int], sigma: Mapping[int, int]) -> List[str]:
    """The three sign-function clauses, checked literally."""
    anchor = set(anchor)
    out = []
    for v in g.vertices:
        if (sigma[v] == 0) != (v not in anchor):
            out.append(f"sigma({v})={sigma[v]} but anchor membership is {v in anchor}")
    for u, v in g.sorted_edges():
        if u in anchor and v in anchor and sigma[u] != sigma[v]:
            out.append(f"adjacent anchor points {u},{v} have different signs")
    for z in g.vertices:
        if z in anchor:
            continue
        nb = [u for u in g.neighbors(z) if u in anchor]
        for u, v in itertools.combinations(nb, 2):
            if sigma[u] != -sigma[v]:
                out.append(f"anchor points {u},{v} share non-anchor neighbour {z} but signs agree")
    return out


def sign_function(g: Graph, anchor: Iterable[int], positive_at: Optional[int] = None) -> Dict[int, int]:
    """A sign function for the given anchor with sigma(positive_at) = +1.

    Signs are pushed along the two kinds of constraint (equal across an edge
    between anchor points, opposite across a shared non-anchor neighbour); each
    constraint component is seeded +1 at its smallest vertex.
    """
    anchor = frozenset(anchor)
    if not anchor:
        return {v: 0 for v in g.vertices}
    if positive_at is not None and positive_at not in anchor:
        raise PreconditionError(f"vertex {positive_at} is not an anchor point")
    links: Dict[int, List[Tuple[int, int]]] = {v: [] for v in anchor}
    for u, v in g.sorted_edges():
        if u in anchor and v in anchor:
            links[u].append((v, 1))
            links[v].append((u, 1))
    for z in g.vertices:
        if z in anchor:
            continue
        nb = [u for u in g.neighbors(z) if u in anchor]
        for u, v in itertools.combinations(nb, 2):
            links[u].append((v, -1))
            links[v].append((u, -1))
    sigma = {v: 0 for v in g.vertices}
    order = sorted(anchor)
    if positive_at is not None:
        order.remove(positive_at)
        order.insert(0, positive_at)
    for seed in order:
        if sigma[seed]:
            continue
        sigma[seed] = 1
        stack = [seed]
        while stack:
            u = stack.pop()
            for v, rel in links[u]:
                want = sigma[u] * rel
                if sigma[v] == 0:
                    sigma[v] = want
                    stack.append(v)
                elif sigma[v] != want:
                    raise PreconditionError(f"no sign function: conflicting parity at vertex {v}")
    return sigma


# ---------------------------------------------------------------- labeling frames

@dataclass(frozen=True)
class Frame:
    """Closure points plus signs that the cycle/net constructions run on.

    `closure` holds the non-anchor points: degree-2 vertices on cycles, pairwise
    non-adjacent, with every simple cycle passing through an even, positive
    number of them. `roots` (only filled for residue field of size 2) names one
    anchor vertex per component of the anchor forest.
    """

    anchor: FrozenSet[int]
    closure: FrozenSet[int]
    sign: Mapping[int, int]
    roots: Tuple[int, ...] = ()


def frame_violations(g: Graph, anchor: Iterable[int], sigma: Mapping[int, int]) -> List[str]:
    """Why (anchor, sigma) cannot drive the propagation-and-closure construction."""
    anchor = set(anchor)
    out = sign_clause_violations(g, anchor, sigma)
    closure = set(g.vertex_set) - anchor
    for z in sorted(closure):
        nb = g.neighbors(z)
        if len(nb) != 2:
            out.append(f"non-anchor point {z} has degree {len(nb)}")
        elif any(u in closure for u in nb):
            out.append(f"non-anchor point {z} has a non-anchor neighbour")
        elif sigma[nb[0]] != -sigma[nb[1]]:
            out.append(f"neighbours of non-anchor point {z} do not have opposite signs")
    forest = g.subgraph(anchor)
    n_comp = len(forest.components()) if anchor else 0
    if len(forest.edges) != len(anchor) - n_comp:
        out.append("anchor points span a cycle")
    return out


def _segments_of_block(g: Graph, bedges: FrozenSet[Edge], branch: Sequence[int]) -> List[Tuple[int, Tuple[int, ...], int]]:
    badj: Dict[int, List[int]] = {}
    for a, b in bedges:
        badj.setdefault(a, []).append(b)
        badj.setdefault(b, []).append(a)
    is_branch = set(branch)
    seen = set()
    out = []
    for b in sorted(branch):
        for nb in sorted(badj[b]):
            if edge_key(b, nb) in seen:
                continue
            seen.add(edge_key(b, nb))
            path, prev, cur = [], b, nb
            while cur not in is_branch:
                path.append(cur)
                nxt = [x for x in badj[cur] if x != prev][0]
                seen.add(edge_key(cur, nxt))
                prev, cur = cur, nxt
            out.append((b, tuple(path), cur))
    return out


class _UnionFind:
    def __init__(self):
        self.parent: Dict[int, int] = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def _block_options(g: Graph, bedges: FrozenSet[Edge], prefer: Optional[int],
                   all_placements: bool, deg: Mapping[int, int],
                   allowed: Optional[FrozenSet[int]] = None) -> Iterator[Tuple[FrozenSet[int], Dict[int, int]]]:
    """Closure choices for one block, with block-relative signs."""
    verts = sorted({v for e in bedges for v in e})
    if len(bedges) == 1:
        yield frozenset(), {v: 1 for v in verts}
        return
    branch = [v for v in verts if deg[v] != 2]
    if not branch:
        branch = [prefer if prefer in verts else verts[0]]
    segs = _segments_of_block(g, bedges, branch)
    first = branch[0]
    others = branch[1:]
    for bits in itertools.product((1, -1), repeat=len(others)):
        tau = {first: 1, **dict(zip(others, bits))}
        kinds = []
        ok = True
        for a, inner, b in segs:
            if tau[a] != tau[b]:
                if not inner:
                    ok = False
                    break
                kinds.append(1)
            else:
                kinds.append(0 if len(inner) < 3 else None)
        if not ok:
            continue
        uf = _UnionFind()
        for (a, inner, b), kd in zip(segs, kinds):
            if kd == 0 and (a == b or not uf.union(a, b)):
                ok = False
                break
        if not ok:
            continue
        for idx, ((a, inner, b), kd) in enumerate(zip(segs, kinds)):
            if kd is None:
                kinds[idx] = 0 if (a != b and uf.union(a, b)) else 2
        choices = []
        for (a, inner, b), kd in zip(segs, kinds):
            L = len(inner)
            if kd == 0:
                opts = [()]
            elif kd == 1:
                opts = [(i,) for i in range(L)]
            else:
                opts = [(0, L - 1)] + [(i, j) for i in range(L) for j in range(i + 2, L) if (i, j) != (0, L - 1)]
            opts = [o for o in opts if all(inner[i] != prefer and (allowed is None or inner[i] in allowed)
                                           for i in o)]
            if not opts:
                break
            choices.append(opts if all_placements else opts[:1])
        if len(choices) != len(segs):
            continue
        for placement in itertools.product(*choices):
            closure = set()
            sign = {v: tau[v] for v in branch}
            for (a, inner, b), pos in zip(segs, placement):
                cur = tau[a]
                for i, v in enumerate(inner):
                    if i in pos:
                        closure.add(v)
                        sign[v] = 0
                        cur = -cur
                    else:
                        sign[v] = cur
            yield frozenset(closure), sign


def _block_tree_order(g: Graph, root: int):
    """Blocks in BFS order from the blocks at `root`, each with its entry vertex."""
    comps, _ = blocks(g)
    at: Dict[int, List[int]] = {}
    for i, c in enumerate(comps):
        for v in {x for e in c for x in e}:
            at.setdefault(v, []).append(i)
    order, seen_b, seen_v = [], set(), {root}
    queue = [(root, i) for i in at.get(root, [])]
    while queue:
        entry, bi = queue.pop(0)
        if bi in seen_b:
            continue
        seen_b.add(bi)
        order.append((bi, entry))
        for v in sorted({x for e in comps[bi] for x in e}):
            if v not in seen_v:
                seen_v.add(v)
                queue.extend((v, j) for j in at[v] if j not in seen_b)
    return comps, order


def _components(g: Graph, anchor: FrozenSet[int]) -> Dict[int, int]:
    comp: Dict[int, int] = {}
    for root in sorted(anchor):
        if root in comp:
            continue
        comp[root] = root
        stack = [root]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if w in anchor and w not in comp:
                    comp[w] = root
                    stack.append(w)
    return comp


def _assign_roots(g: Graph, closure: FrozenSet[int], anchor: FrozenSet[int],
                  center: int) -> Optional[Tuple[int, ...]]:
    """One root per anchor component such that every closure point touches a root."""
    comp = _components(g, anchor)
    fixed = {comp[center]: center}
    zs = sorted(closure)

    def go(i, roots):
        if i == len(zs):
            return roots
        for y in g.neighbors(zs[i]):
            c = comp[y]
            if roots.get(c, y) == y:
                new = dict(roots)
                new[c] = y
                res = go(i + 1, new)
                if res is not None:
                    return res
        return None

    roots = go(0, fixed)
    if roots is None:
        return None
    for v in sorted(anchor):
        roots.setdefault(comp[v], v)
    return tuple(sorted(roots.values()))


def default_root(g: Graph) -> int:
    """Smallest vertex of degree other than 2, or the smallest vertex of a cycle."""
    return next((v for v in g.vertices if g.degree(v) != 2), g.vertices[0])


def iter_frames(g: Graph, start: Optional[int] = None, residue2: bool = False,
                budget: int = 10**5, degree: Optional[Mapping[int, int]] = None,
                exhaustive: bool = False, closure_allowed: Optional[Iterable[int]] = None) -> Iterator[Frame]:
    """Frames of a connected graph, block by block, with sigma(start) = +1.

    With residue2 set, closure positions are enumerated exhaustively and only
    frames admitting a root system (every closure point adjacent to the root of
    one of its neighbouring components, `start` being the root of its own) are
    produced. `degree` overrides vertex degrees (a region inside a larger
    graph keeps the degrees of the whole graph), `closure_allowed` restricts
    where closure points may sit, and `exhaustive` enumerates every placement.
    """
    if not g.is_connected():
        raise PreconditionError("graph is not connected")
    if start is None:
        start = default_root(g)
    comps, order = _block_tree_order(g, start)
    deg = degree if degree is not None else {v: g.degree(v) for v in g.vertex_set}
    allowed = None if closure_allowed is None else frozenset(closure_allowed)
    every = residue2 or exhaustive
    count = [0]

    def go(k, closure, sign):
        if k == len(order):
            count[0] += 1
            if count[0] > budget:
                return
            anchor = frozenset(g.vertex_set - closure)
            if residue2:
                roots = _assign_roots(g, frozenset(closure), anchor, start)
                if roots is None:
                    return
                yield Frame(anchor, frozenset(closure), dict(sign), roots)
            else:
                yield Frame(anchor, frozenset(closure), dict(sign))
            return
        bi, entry = order[k]
        for cl, rel in _block_options(g, comps[bi], entry, every, deg, allowed):
            if entry in cl or count[0] > budget:
                continue
            flip = sign.get(entry, 1) * rel[entry]
            new_sign = dict(sign)
            new_sign.update({v: s * flip for v, s in rel.items()})
            yield from go(k + 1, closure | cl, new_sign)
            if not every:
                return

    if not order:
        yield Frame(frozenset(g.vertex_set), frozenset(), {v: 1 for v in g.vertex_set}, (start,))
        return
    yield from go(0, frozenset(), {start: 1})


def find_frame(g: Graph, start: Optional[int] = None, residue2: bool = False,
               budget: int = 10**5, **kw) -> Optional[Frame]:
    return next(iter_frames(g, start, residue2, budget, **kw), None)


# ---------------------------------------------------------------- report

def classify(g, budget: int = DEFAULT_CYCLE_BUDGET) -> dict:
    wg = g if isinstance(g, WeightedGraph) else None
    base = wg.base if wg else g
    connected = base.is_connected()
    out = {"connected": connected}
    if not connected:
        return out
    border, witness = is_borderless(base, budget)
    net = is_net(base)
    bad = find_bad_cycles(base, budget)
    try:
        anchor = anchors(base, budget)
    except PreconditionError:
        anchor = None
    out["borderless"] = border
    if witness:
        out["borderless_witness"] = [list(witness[0]), list(witness[1])]
    out["net"] = net
    out["eta"] = eta(base) if net else None
    out["bad_cycles"] = [{"cycle": list(b.cycle), "low_degree_pair": list(b.low_degree_pair)} for b in bad]
    out["anchors"] = {"canonical": None if anchor is None else sorted(anchor)}
    out["sign_function"] = None
    if anchor is not None:
        try:
            sigma = sign_function(base, anchor, min(anchor) if anchor else None)
            out["sign_function"] = {str(v): s for v, s in sorted(sigma.items())}
        except PreconditionError:
            pass
    fr = find_frame(base) if not bad else None
    out["frame"] = None if fr is None else {
        "closure_points": sorted(fr.closure),
        "sign": {str(v): s for v, s in sorted(fr.sign.items())}}
    if wg is not None:
        out["unfavorable_proximities"] = [p.as_dict() for p in find_unfavorable_proximities(wg, budget)]
    return out

"""Constructive labelings for balance-equation systems.

A labeling sends each vertex v to a pair (alpha_v, beta_v) and is consistent
when alpha_u*beta_v - alpha_v*beta_u equals the oriented weight of every edge.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .classify import (Frame, PreconditionError, ProximityReport, _components, default_root,
                       find_bad_cycles, find_frame, find_unfavorable_proximities, frame_violations,
                       is_borderless, is_net, iter_frames)
from .graph import Graph, GraphError, WeightedGraph, blocks, edge_key, simple_cycles, wedge_renaming, wedge_sum
from .oracle import BudgetExceeded, Labeled as OracleLabeled, oracle_solve
from .ring import RingElem, RingError, RingSpec, ResidueFieldTooSmall, find_unit_avoiding, inverse, val_unit

Pair = Tuple[RingElem, RingElem]
Labeling = Dict[int, Pair]


class LabelingError(ValueError):
    pass


class ClauseError(LabelingError):
    """No labeling satisfies the requested unit/residue clauses."""


# ---------------------------------------------------------------- outcomes

@dataclass(frozen=True)
class Labeled:
    labeling: Labeling
    route: str = ""


@dataclass(frozen=True)
class OracleExhaustion:
    """Certificate of unsolvability from a complete search."""
    nodes: int

    def as_dict(self) -> dict:
        return {"kind": "oracle-exhaustion", "nodes": self.nodes}


@dataclass(frozen=True)
class NoSolution:
    certificate: object
    route: str = ""


@dataclass(frozen=True)
class Unknown:
    reason: str
    route: str = ""


# ---------------------------------------------------------------- verification

def edge_failures(wg: WeightedGraph, lab: Mapping[int, Pair]) -> List[Tuple[int, int]]:
    if set(lab) != set(wg.base.vertex_set):
        raise LabelingError("labeling domain differs from the vertex set")
    bad = []
    for u, v in wg.base.sorted_edges():
        (a1, b1), (a2, b2) = lab[u], lab[v]
        if a1 * b2 - a2 * b1 != wg.w(u, v):
            bad.append((u, v))
    return bad


def verify_labeling(wg: WeightedGraph, lab: Mapping[int, Pair]) -> bool:
    return not edge_failures(wg, lab)


def _checked(wg: WeightedGraph, lab: Labeling) -> Labeling:
    bad = edge_failures(wg, lab)
    if bad:
        raise AssertionError(f"construction produced an inconsistent labeling on edges {bad}")
    return lab


def _negated(wg: WeightedGraph) -> WeightedGraph:
    return WeightedGraph(wg.ring, wg.base, {e: -d for e, d in wg.weight.items()})


def _swap(lab: Mapping[int, Pair]) -> Labeling:
    # (alpha, beta) -> (beta, alpha) turns a labeling of -D into one of D
    return {v: (b, a) for v, (a, b) in lab.items()}


# ---------------------------------------------------------------- propagation primitives

def _positive_step(w: RingElem, u: Pair, rho: RingElem) -> Pair:
    """Extend across an edge keeping alpha a unit and beta/alpha in {0, rho} mod m."""
    a_u, b_u = u
    one = w.spec.one()
    if w.residue == 0:
        t = one
    elif b_u.residue == 0:
        t = w * inverse(a_u) * inverse(rho)
    else:
        t = -w * inverse(b_u)
    return t, (w + t * b_u) * inverse(a_u)


def _negative_step(w: RingElem, u: Pair, gamma: RingElem) -> Pair:
    """Mirror of _positive_step: beta stays a unit, beta/alpha in {inf, gamma} mod m."""
    b, a = _positive_step(-w, (u[1], u[0]), inverse(gamma))
    return a, b


def _close(y1: Pair, w1: RingElem, y2: Pair, w2: RingElem) -> Pair:
    """The unique z with det(y1, z) = w1 and det(y2, z) = w2; det(y1, y2) must be a unit."""
    (a1, b1), (a2, b2) = y1, y2
    d = a1 * b2 - a2 * b1
    if not d.is_unit():
        raise LabelingError("closure point between neighbours with equal residue ratios")
    di = inverse(d)
    return (w1 * a2 - a1 * w2) * di, (w1 * b2 - b1 * w2) * di


def ratio_class(a: RingElem, b: RingElem) -> RingElem:
    """The residue ratio the positive side of a construction pinned at (a, b) keeps."""
    return b * inverse(a) if b.residue else inverse(a)


# ---------------------------------------------------------------- trees

def label_tree(wg: WeightedGraph, x_labels: Optional[Mapping[int, RingElem]] = None,
               free_y: Optional[Tuple[int, RingElem]] = None) -> Labeling:
    """Any unit x-labels plus one free y-label extend uniquely along a tree."""
    g = wg.base
    if not g.is_tree():
        raise PreconditionError("label_tree needs a tree")
    R = wg.ring
    xs = {v: R.one() for v in g.vertices}
    for v, x in (x_labels or {}).items():
        x = x if isinstance(x, RingElem) else R(x)
        if not x.is_unit():
            raise PreconditionError(f"x-label of vertex {v} is not a unit")
        xs[v] = x
    root, y0 = free_y if free_y is not None else (g.vertices[0], R.zero())
    y0 = y0 if isinstance(y0, RingElem) else R(y0)
    lab = {root: (xs[root], y0)}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if v not in lab:
                a_u, b_u = lab[u]
                lab[v] = (xs[v], (wg.w(u, v) + xs[v] * b_u) * inverse(a_u))
                queue.append(v)
    return _checked(wg, lab)


# ---------------------------------------------------------------- cycles

def _cycle_sequence(g: Graph) -> List[int]:
    start = g.vertices[0]
    seq = [start]
    prev, cur = None, start
    while True:
        nxt = sorted(x for x in g.neighbors(cur) if x != prev)
        prev, cur = cur, nxt[0]
        if cur == start:
            return seq
        seq.append(cur)


def cycle_layout(g: Graph, s: Optional[int], r: int, last: Optional[int] = None) -> Tuple[int, ...]:
    """An enumeration v_1..v_n of the cycle with s before r, and v_r neither v_n
    nor adjacent to it (s = None means s is v_1)."""
    if not g.is_cycle():
        raise PreconditionError("graph is not a cycle")
    seq = _cycle_sequence(g)
    n = len(seq)
    for direction in (seq, seq[::-1]):
        for i in range(n):
            lay = tuple(direction[i:] + direction[:i])
            pos = {v: k + 1 for k, v in enumerate(lay)}
            if not 2 <= pos[r] <= n - 2:
                continue
            if s is None:
                pass
            elif s == r or pos[s] >= pos[r]:
                continue
            if last is not None and lay[-1] != last:
                continue
            return lay
    raise PreconditionError("no enumeration of the cycle satisfies the layout conditions")


def _unit(R: RingSpec, x, name: str) -> RingElem:
    x = x if isinstance(x, RingElem) else R(x)
    if not x.is_unit():
        raise PreconditionError(f"{name} must be a unit")
    return x


def label_cycle(wg: WeightedGraph, s: int, r: int, a=1, b=0, c=1, last: Optional[int] = None) -> Labeling:
    """Label a cycle of length > 3 with s -> (a, b) and beta of the vertex after r equal to c.

    In the internal enumeration alpha is a unit before r and beta is a unit
    strictly between r and the last vertex.
    """
    g = wg.base
    R = wg.ring
    if R.p < 3:
        raise ResidueFieldTooSmall("the cycle construction needs at least three residue classes")
    if not g.is_cycle() or len(g.vertex_set) <= 3:
        raise PreconditionError("label_cycle needs a cycle with more than three vertices")
    a, c = _unit(R, a, "a"), _unit(R, c, "c")
    b = b if isinstance(b, RingElem) else R(b)
    lay = cycle_layout(g, s, r, last)
    n = len(lay)
    v = lambda k: lay[k - 1]
    w = lambda i, j: wg.w(v(i), v(j))
    ks, kr = lay.index(s) + 1, lay.index(r) + 1
    lab: Labeling = {s: (a, b)}
    rho = ratio_class(a, b)
    # Step 1: s .. r-1
    for k in range(ks + 1, kr):
        lab[v(k)] = _positive_step(w(k - 1, k), lab[v(k - 1)], rho)
    # Step 2: r, r+1 .. n-1
    a_prev, b_prev = lab[v(kr - 1)]
    alpha_r = w(kr, kr + 1) * inverse(c)
    lab[v(kr)] = (alpha_r, (w(kr - 1, kr) + alpha_r * b_prev) * inverse(a_prev))
    lab[v(kr + 1)] = (R.zero(), c)
    gamma = find_unit_avoiding(R, rho.residue)
    for k in range(kr + 2, n):
        lab[v(k)] = _negative_step(w(k - 1, k), lab[v(k - 1)], gamma)
    # Step 3: s-1 .. 1
    for k in range(ks - 1, 0, -1):
        lab[v(k)] = _positive_step(w(k + 1, k), lab[v(k + 1)], rho)
    # Step 4: n
    lab[v(n)] = _close(lab[v(n - 1)], w(n - 1, n), lab[v(1)], w(1, n))
    return _checked(wg, lab)


def cycle_clause_violations(wg: WeightedGraph, lab: Labeling, s: int, r: int, a, b, c,
                            last: Optional[int] = None) -> List[str]:
    R = wg.ring
    lay = cycle_layout(wg.base, s, r, last)
    n = len(lay)
    kr = lay.index(r) + 1
    out = []
    if lab[s] != (R(int(a)), R(int(b))):
        out.append("s is not labeled (a, b)")
    if lab[lay[kr]][1] != R(int(c)):
        out.append("beta after r is not c")
    for k in range(1, n + 1):
        x, y = lab[lay[k - 1]]
        if k < kr and not x.is_unit():
            out.append(f"alpha at position {k} is not a unit")
        if kr < k < n and not y.is_unit():
            out.append(f"beta at position {k} is not a unit")
    return out


def label_cycle_residue2(wg: WeightedGraph, r: int, a1=1, a2=1, a3=1, a4=1) -> Labeling:
    """Cycle labeling that works for any residue field, at the price of fixing
    v_1 -> (a3, 0) and the residue ratios on both sides."""
    g = wg.base
    R = wg.ring
    if not g.is_cycle() or len(g.vertex_set) <= 3:
        raise PreconditionError("label_cycle_residue2 needs a cycle with more than three vertices")
    a1, a2, a3, a4 = (_unit(R, x, name) for x, name in ((a1, "a1"), (a2, "a2"), (a3, "a3"), (a4, "a4")))
    lay = cycle_layout(g, None, r)
    n = len(lay)
    v = lambda k: lay[k - 1]
    w = lambda i, j: wg.w(v(i), v(j))
    kr = lay.index(r) + 1
    lab: Labeling = {v(1): (a3, R.zero())}
    for k in range(2, kr):
        lab[v(k)] = _positive_step(w(k - 1, k), lab[v(k - 1)], a1)
    a_prev, b_prev = lab[v(kr - 1)]
    alpha_r = w(kr, kr + 1) * inverse(a4)
    lab[v(kr)] = (alpha_r, (w(kr - 1, kr) + alpha_r * b_prev) * inverse(a_prev))
    lab[v(kr + 1)] = (R.zero(), a4)
    for k in range(kr + 2, n):
        lab[v(k)] = _negative_step(w(k - 1, k), lab[v(k - 1)], a2)
    lab[v(n)] = _close(lab[v(n - 1)], w(n - 1, n), lab[v(1)], w(1, n))
    return _checked(wg, lab)


def cycle_residue2_clause_violations(wg: WeightedGraph, lab: Labeling, r: int, a1, a2, a3, a4) -> List[str]:
    R = wg.ring
    p = R.p
    lay = cycle_layout(wg.base, None, r)
    n = len(lay)
    kr = lay.index(r) + 1
    out = []
    for k in range(1, n + 1):
        x, y = lab[lay[k - 1]]
        if k < kr:
            if not x.is_unit():
                out.append(f"(i) fails at position {k}")
            elif y.residue and (y * inverse(x)).residue != int(a1) % p:
                out.append(f"(ii) fails at position {k}")
        if kr < k < n:
            if not y.is_unit():
                out.append(f"(iii) fails at position {k}")
            elif x.residue and (y * inverse(x)).residue != int(a2) % p:
                out.append(f"(iv) fails at position {k}")
    if lab[lay[0]][0] != R(int(a3)) or lab[lay[kr]][1] != R(int(a4)):
        out.append("(v) fails")
    return out


# ---------------------------------------------------------------- triangles

def _triangle_layouts(verts: Sequence[int]):
    a, b, c = verts
    return [(a, b, c), (b, c, a), (c, a, b), (a, c, b), (b, a, c), (c, b, a)]


def label_triangle(wg: WeightedGraph) -> Labeling:
    """Closed-form labeling of a triangle over Z/p^k."""
    g = wg.base
    if not (g.is_cycle() and len(g.vertex_set) == 3):
        raise PreconditionError("label_triangle needs a triangle")
    R = wg.ring
    layouts = _triangle_layouts(g.vertices)
    # Case 1: some weight is a unit; arrange for it to sit on v2v3
    for v1, v2, v3 in layouts:
        d12, d13, d23 = wg.w(v1, v2), wg.w(v1, v3), wg.w(v2, v3)
        if d23.is_unit():
            lab = {v1: (d13, inverse(d23) * (d13 - d12)), v2: (d23, R.one()), v3: (R.zero(), R.one())}
            return _checked(wg, lab)
    # Case 2: all weights in m; d = gamma * p^l with l12 >= l13
    def vu(x):
        l, u = val_unit(x)
        return l, (u if u is not None else R.one())
    for v1, v2, v3 in layouts:
        d12, d13, d23 = wg.w(v1, v2), wg.w(v1, v3), wg.w(v2, v3)
        (l12, g12), (l13, g13) = vu(d12), vu(d13)
        if l12 >= l13:
            beta2 = inverse(g13) * g12 * R(R.p) ** (l12 - l13)
            lab = {v1: (d13, R.zero()), v2: (d23, beta2), v3: (R.zero(), R.one())}
            return _checked(wg, lab)
    raise AssertionError("unreachable: some ordering has l12 >= l13")


# ---------------------------------------------------------------- gluing

def merge_labelings(wg1: WeightedGraph, lab1: Labeling, wg2: WeightedGraph, lab2: Labeling,
                    v: int, w: int) -> Tuple[WeightedGraph, Labeling]:
    """Wedge two labeled graphs at v ~ w; the second graph is renumbered after the first."""
    if wg1.ring != wg2.ring:
        raise PreconditionError("graphs live over different rings")
    if lab1[v] != lab2[w]:
        raise LabelingError(f"labels disagree at the glue point: {lab1[v]} vs {lab2[w]}")
    rename = wedge_renaming(wg1.base, wg2.base, v, w)
    g = wedge_sum(wg1.base, wg2.base, v, w)
    weights = dict(wg1.weight)
    for (x, y), d in wg2.weight.items():
        nx, ny = rename[x], rename[y]
        weights[edge_key(nx, ny)] = d if nx < ny else -d
    merged = WeightedGraph(wg1.ring, g, weights)
    lab = dict(lab1)
    lab.update({rename[u]: pair for u, pair in lab2.items()})
    return merged, _checked(merged, lab)


# ---------------------------------------------------------------- frames

def frame_labeling(wg: WeightedGraph, frame: Frame, s: int, a=1, b=0,
                   rho: Optional[RingElem] = None) -> Labeling:
    """Propagate inside each anchor tree from its root, then solve every closure point.

    The root s gets (a, b); other roots get (1, 0) or (0, 1) by sign. Positive
    vertices keep alpha a unit with ratio class in {0, rho}, negative ones keep
    beta a unit with ratio class in {inf, gamma}, rho != gamma, so every
    closure point sits between two neighbours with a unit determinant.
    """
    R = wg.ring
    g = wg.base
    a = a if isinstance(a, RingElem) else R(a)
    b = b if isinstance(b, RingElem) else R(b)
    if s not in frame.anchor:
        raise PreconditionError(f"vertex {s} is not an anchor point of the frame")
    if not a.is_unit():
        if not b.is_unit():
            raise PreconditionError("at least one of a, b must be a unit")
        return _checked(wg, _swap(frame_labeling(_negated(wg), frame, s, b, a)))
    flip = frame.sign[s]
    sign = {v: flip * x for v, x in frame.sign.items()}
    if rho is None:
        rho = ratio_class(a, b)
    gamma = find_unit_avoiding(R, rho.residue) if R.p >= 3 else R.one()
    comp = _components(g, frame.anchor)
    roots = {comp[s]: s}
    for x in frame.roots:
        roots.setdefault(comp[x], x)
    for v in sorted(frame.anchor):
        roots.setdefault(comp[v], v)
    lab: Labeling = {}
    for c, root in roots.items():
        if root == s:
            lab[root] = (a, b)
        elif sign[root] > 0:
            lab[root] = (R.one(), R.zero())
        else:
            lab[root] = (R.zero(), R.one())
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if v in frame.anchor and v not in lab:
                    step = _positive_step if sign[v] > 0 else _negative_step
                    lab[v] = step(wg.w(u, v), lab[u], rho if sign[v] > 0 else gamma)
                    queue.append(v)
    for z in sorted(frame.closure):
        y1, y2 = g.neighbors(z)
        lab[z] = _close(lab[y1], wg.w(y1, z), lab[y2], wg.w(y2, z))
    return _checked(wg, lab)


def _frame_from(g: Graph, anchor: Iterable[int], sigma: Mapping[int, int]) -> Optional[Frame]:
    anchor = frozenset(anchor)
    if frame_violations(g, anchor, sigma):
        return None
    closure = frozenset(g.vertex_set - anchor)
    if any(all(v in anchor for v in c) for c in simple_cycles(g)):
        return None
    return Frame(anchor, closure, dict(sigma))


def _constrained_search(wg: WeightedGraph, allowed, budget: int) -> Labeling:
    res = oracle_solve(wg, budget, allowed)
    if isinstance(res, OracleLabeled):
        return _checked(wg, res.labeling)
    if isinstance(res, BudgetExceeded):
        raise ClauseError("search budget exhausted before a clause-respecting labeling was found")
    raise ClauseError("no consistent labeling satisfies the requested clauses")


def label_borderless(wg: WeightedGraph, anchor: Optional[Iterable[int]] = None, u: Optional[int] = None,
                     a=None, b=None, search_budget: int = 10**7) -> Labeling:
    """Label a borderless graph with u -> (a, b) and a unit coordinate on every anchor vertex."""
    g = wg.base
    R = wg.ring
    if R.p < 3:
        raise ResidueFieldTooSmall("needs at least three residue classes")
    if not is_borderless(g)[0]:
        raise PreconditionError("graph is not borderless")
    if g.is_cycle() and len(g.vertex_set) == 3:
        raise PreconditionError("graph is a triangle")
    if find_bad_cycles(g):
        raise PreconditionError("graph contains a bad cycle")
    u = default_root(g) if u is None else u
    a = R.one() if a is None else (a if isinstance(a, RingElem) else R(a))
    b = R.zero() if b is None else (b if isinstance(b, RingElem) else R(b))
    if not (a.is_unit() or b.is_unit()):
        raise PreconditionError("at least one of a, b must be a unit")
    anchor = None if anchor is None else frozenset(anchor)
    if anchor is not None and u not in anchor:
        raise PreconditionError(f"vertex {u} is not in the anchor")
    if g.is_tree():
        if a.is_unit():
            return label_tree(wg, {u: a}, (u, b))
        return _swap(label_tree(_negated(wg), {u: b}, (u, a)))
    allowed = None if anchor is None else g.vertex_set - anchor
    frame = find_frame(g, u, exhaustive=anchor is not None, closure_allowed=allowed)
    if frame is not None:
        return frame_labeling(wg, frame, u, a, b)
    pin = (a.value, b.value)
    return _constrained_search(
        wg, lambda v, x, y: (x, y) == pin if v == u else
        (v not in anchor or x % R.p != 0 or y % R.p != 0), search_budget)


def net_clause_violations(wg: WeightedGraph, lab: Labeling, sigma: Mapping[int, int], s: int,
                          a, b) -> List[str]:
    R = wg.ring
    p = R.p
    a, b = R(int(a)), R(int(b))
    rho = ratio_class(a, b).residue
    gamma = find_unit_avoiding(R, rho).residue
    out = []
    if lab[s] != (a, b):
        out.append("(iii) s is not labeled (a, b)")
    for v, sg in sigma.items():
        x, y = lab[v]
        if sg > 0:
            if not x.is_unit():
                out.append(f"(i) fails at {v}")
            elif y.residue and (y * inverse(x)).residue != rho:
                out.append(f"(iv)/(v) positive ratio fails at {v}")
        elif sg < 0:
            if not y.is_unit():
                out.append(f"(ii) fails at {v}")
            elif x.residue and (y * inverse(x)).residue != gamma:
                out.append(f"(iv)/(v) negative ratio fails at {v}")
    return out


def label_net(wg: WeightedGraph, anchor: Optional[Iterable[int]] = None, sigma: Optional[Mapping[int, int]] = None,
              s: Optional[int] = None, a=1, b=0, search_budget: int = 10**7) -> Labeling:
    """Label a net so that positive vertices get unit alpha, negative ones unit beta,
    s -> (a, b), and the residue ratios stay in {0, rho} and {inf, gamma}."""
    g = wg.base
    R = wg.ring
    if R.p < 3:
        raise ResidueFieldTooSmall("needs at least three residue classes")
    if not is_net(g):
        raise PreconditionError("graph is not a net")
    if g.is_cycle() and len(g.vertex_set) == 3:
        raise PreconditionError("graph is a triangle")
    if find_bad_cycles(g):
        raise PreconditionError("graph contains a bad cycle")
    a = _unit(R, a, "a")
    b = b if isinstance(b, RingElem) else R(b)
    if anchor is None or sigma is None:
        s = default_root(g) if s is None else s
        frame = find_frame(g, s)
        if frame is None:
            raise ClauseError("graph admits no labeling frame through the given vertex")
        if g.is_cycle():
            z1, z2 = sorted(frame.closure)
            for r, last in ((z1, z2), (z2, z1)):
                try:
                    return label_cycle(wg, s, r, a, b, R.one(), last)
                except PreconditionError:
                    continue
        return frame_labeling(wg, frame, s, a, b)
    anchor = frozenset(anchor)
    if s is None:
        s = min(v for v in anchor if sigma[v] > 0)
    if s not in anchor or sigma.get(s, 0) <= 0:
        raise PreconditionError("s must be an anchor vertex of positive parity")
    frame = _frame_from(g, anchor, sigma)
    if frame is not None:
        return frame_labeling(wg, frame, s, a, b)
    p = R.p
    rho = ratio_class(a, b).residue
    gamma = find_unit_avoiding(R, rho).residue
    inv = lambda x: pow(x, -1, p)

    def allowed(v, x, y):
        if v == s:
            return (x, y) == (a.value, b.value)
        if sigma.get(v, 0) > 0:
            return x % p != 0 and (y % p == 0 or y * inv(x % p) % p == rho)
        if sigma.get(v, 0) < 0:
            return y % p != 0 and (x % p == 0 or y * inv(x % p) % p == gamma)
        return True

    return _constrained_search(wg, allowed, search_budget)


# ---------------------------------------------------------------- triangles with one pinned vertex

def _solve_linear(a: int, rhs: int, mod: int) -> Optional[Tuple[int, int]]:
    """Solutions of a*x = rhs (mod mod) as (x0, step)."""
    g = gcd(a, mod)
    if rhs % g:
        return None
    m = mod // g
    if m == 1:
        return 0, 1
    return (rhs // g) * pow(a // g, -1, m) % m, m


def _pinned_triangle(wg: WeightedGraph, v: int, pv: Pair, nonzero: FrozenSet[int]) -> Optional[Labeling]:
    """Extend a fixed nonzero label at v over a triangle.

    Write x = l1*v + m1*e, y = l2*v + m2*e with det(v, e) = 1; then m1, m2 are
    forced and l1*m2 - l2*m1 must equal w(x, y).
    """
    R = wg.ring
    q, p = R.modulus, R.p
    x, y = sorted(wg.base.vertex_set - {v})
    av, bv = pv
    if av.is_unit():
        e = (R.zero(), inverse(av))
    elif bv.is_unit():
        e = (-inverse(bv), R.zero())
    else:
        return None
    m1, m2, w3 = wg.w(v, x), wg.w(v, y), wg.w(x, y)

    def build(l1, l2):
        lx = (R(l1) * av + m1 * e[0], R(l1) * bv + m1 * e[1])
        ly = (R(l2) * av + m2 * e[0], R(l2) * bv + m2 * e[1])
        return lx, ly

    def fine(pair, vert):
        return vert not in nonzero or pair[0].residue or pair[1].residue

    tries = range(min(q, 64))
    for first in (True, False):
        for free in tries:
            # first: l2 free, solve l1*m2 = w3 + l2*m1; else l1 free, solve l2*m1 = l1*m2 - w3
            if first:
                sol = _solve_linear(m2.value, (w3 + R(free) * m1).value, q)
            else:
                sol = _solve_linear(m1.value, (R(free) * m2 - w3).value, q)
            if sol is None:
                continue
            x0, step = sol
            for t in range(min(q // step, p + 1)):
                other = (x0 + t * step) % q
                l1, l2 = (other, free) if first else (free, other)
                lx, ly = build(l1, l2)
                if fine(lx, x) and fine(ly, y):
                    lab = {v: pv, x: lx, y: ly}
                    if verify_labeling(wg, lab):
                        return lab
    return None


# ---------------------------------------------------------------- dispatcher

def _is_triangle_block(edges) -> bool:
    return len(edges) == 3 and len({v for e in edges for v in e}) == 3


def _block_search(sub: WeightedGraph, pin: Optional[int], pin_label: Optional[Pair],
                  nonzero: FrozenSet[int], budget: int) -> Optional[Labeling]:
    p = sub.ring.p
    want = None if pin is None else (pin_label[0].value, pin_label[1].value)

    def allowed(v, x, y):
        if v == pin:
            return (x, y) == want
        return v not in nonzero or x % p != 0 or y % p != 0

    res = oracle_solve(sub, budget, allowed)
    return res.labeling if isinstance(res, OracleLabeled) else None


def _label_by_blocks(wg: WeightedGraph, block_budget: int) -> Optional[Tuple[Labeling, str]]:
    """Label block by block along the block-cut tree, each block pinned at the
    cut vertex through which it is reached.

    Blocks with a frame use the propagation-and-closure construction, triangle
    blocks the pinned triangle extension, and any other block a bounded exact
    search. Cut vertices are kept nonzero so that the next block can be pinned.
    """
    g = wg.base
    comps, cuts = blocks(g)
    bverts = [frozenset(v for e in c for v in e) for c in comps]
    shared = frozenset(cuts)
    deg = {v: g.degree(v) for v in g.vertex_set}
    R = wg.ring

    def nonzero_pair(pair) -> bool:
        return bool(pair[0].residue or pair[1].residue)

    def label_block(i, pin, pin_label) -> Tuple[Optional[Labeling], str]:
        # keep cut vertices nonzero when possible, otherwise accept a zero one
        for strict in (True, False):
            lab, route = label_block_once(i, pin, pin_label, strict)
            if lab is not None:
                return lab, route
        return None, ""

    def label_block_once(i, pin, pin_label, strict) -> Tuple[Optional[Labeling], str]:
        sub = wg.restrict_edges(comps[i])
        need = shared if strict else frozenset()
        if pin is None or nonzero_pair(pin_label):
            if _is_triangle_block(comps[i]):
                tpin, tlabel = pin, pin_label
                if pin is None:
                    tpin, tlabel = min(bverts[i] & shared or bverts[i]), (R.one(), R.zero())
                lab = _pinned_triangle(sub, tpin, tlabel, need)
                if lab is not None:
                    return lab, "triangle"
            else:
                start = pin if pin is not None else default_root(sub.base)
                frame = find_frame(sub.base, start, degree=deg)
                if frame is not None:
                    a, b = pin_label if pin is not None else (R.one(), R.zero())
                    return frame_labeling(sub, frame, start, a, b), "frame"
        if block_budget <= 0:
            return None, ""
        return _block_search(sub, pin, pin_label, need, block_budget), "search"

    for root in range(len(comps)):
        lab: Labeling = {}
        routes = set()
        done = set()
        queue = deque([(root, None)])
        ok = True
        while queue:
            i, pin = queue.popleft()
            if i in done:
                continue
            part, route = label_block(i, pin, lab.get(pin))
            if part is None:
                ok = False
                break
            routes.add(route)
            done.add(i)
            lab.update(part)
            for v in sorted(bverts[i] & shared):
                for j in range(len(comps)):
                    if j not in done and v in bverts[j]:
                        queue.append((j, v))
        if ok and verify_labeling(wg, lab):
            return lab, "+".join(sorted(routes))
    return None


def label_general(wg: WeightedGraph, oracle_fallback: bool = False, oracle_budget: int = 10**8,
                  block_budget: int = 2 * 10**5):
    """Labeled, NoSolution or Unknown; every Labeled result is verified."""
    R = wg.ring
    g = wg.base
    if not g.edges:
        return Labeled({}, "empty")
    if R.p < 3:
        return label_general_residue2(wg, oracle_fallback=oracle_fallback, oracle_budget=oracle_budget)
    if not g.is_connected():
        return _by_components(wg, lambda part: label_general(part, oracle_fallback, oracle_budget, block_budget))
    if g.is_cycle() and len(g.vertex_set) == 3:
        return Labeled(label_triangle(wg), "triangle")
    prox = find_unfavorable_proximities(wg, first_only=True)
    if prox:
        return NoSolution(prox[0], "proximity")
    found = _label_by_blocks(wg, block_budget)
    if found is not None:
        lab, route = found
        return Labeled(_checked(wg, lab), "blocks:" + route)
    reason = ("bad cycle without unfavorable proximity" if find_bad_cycles(g)
              else "no labeling frame for some block")
    return _fallback(wg, reason, oracle_fallback, oracle_budget)


def _fallback(wg, reason, oracle_fallback, oracle_budget):
    if not oracle_fallback:
        return Unknown(reason)
    res = oracle_solve(wg, oracle_budget)
    if isinstance(res, OracleLabeled):
        return Labeled(_checked(wg, res.labeling), "oracle")
    if isinstance(res, BudgetExceeded):
        return Unknown(reason + "; oracle budget exceeded", "oracle")
    return NoSolution(OracleExhaustion(res.nodes), "oracle")


def _by_components(wg: WeightedGraph, solve):
    lab: Labeling = {}
    routes = []
    for comp in wg.base.components():
        if len(comp) == 1:
            continue
        out = solve(wg.restrict(comp))
        if not isinstance(out, Labeled):
            return out
        lab.update(out.labeling)
        routes.append(out.route)
    return Labeled(_checked(wg, lab), "components(" + ",".join(routes) + ")")


# ---------------------------------------------------------------- residue field of size 2

@dataclass(frozen=True)
class Residue2Report:
    common_vertex: bool
    center: Optional[int]
    segment_condition: bool
    frame: Optional[Frame] = None


def residue2_conditions(g: Graph, anchor: Optional[Iterable[int]] = None, budget: int = 10**5) -> Residue2Report:
    """Both structural conditions of the residue-2 construction.

    The first asks for a vertex shared by all cycles. The second is checked
    as: some frame anchors that vertex and lets every closure point sit next
    to the root of one of its neighbouring anchor components, the shared
    vertex being a root.
    """
    cycles = simple_cycles(g)
    if not cycles:
        return Residue2Report(True, None, True, None)
    common = set(cycles[0])
    for c in cycles[1:]:
        common &= set(c)
    if not common:
        return Residue2Report(False, None, False, None)
    allowed = None if anchor is None else g.vertex_set - set(anchor)
    for c in sorted(common):
        fr = find_frame(g, c, residue2=True, budget=budget, closure_allowed=allowed)
        if fr is not None:
            return Residue2Report(True, c, True, fr)
    return Residue2Report(True, min(common), False, None)


def label_general_residue2(wg: WeightedGraph, anchor: Optional[Iterable[int]] = None,
                           oracle_fallback: bool = False, oracle_budget: int = 10**8):
    g = wg.base
    R = wg.ring
    if not g.edges:
        return Labeled({}, "empty")
    if not g.is_connected():
        return _by_components(wg, lambda part: label_general_residue2(part, anchor, oracle_fallback, oracle_budget))
    if g.is_cycle() and len(g.vertex_set) == 3:
        return Labeled(label_triangle(wg), "triangle")
    prox = find_unfavorable_proximities(wg, first_only=True)
    if prox:
        return NoSolution(prox[0], "proximity")
    if g.is_tree():
        return Labeled(label_tree(wg), "tree")
    if find_bad_cycles(g):
        return _fallback(wg, "bad cycle without unfavorable proximity", oracle_fallback, oracle_budget)
    rep = residue2_conditions(g, anchor)
    if not rep.common_vertex:
        return _fallback(wg, "condition (i) fails: the cycles share no common vertex", oracle_fallback, oracle_budget)
    if not rep.segment_condition:
        return _fallback(wg, "condition (ii) fails: no admissible gluing around the common vertex",
                         oracle_fallback, oracle_budget)
    lab = frame_labeling(wg, rep.frame, rep.center, R.one(), R.zero(), rho=R.one())
    return Labeled(_checked(wg, lab), "residue2")


# ---------------------------------------------------------------- pinned start vertex

def label_pinned(wg: WeightedGraph, v: int, a, b, budget: int = 10**7):
    """Like label_general, with the extra demand that v is labeled (a, b)."""
    R = wg.ring
    g = wg.base
    if v not in g.vertex_set:
        raise LabelingError(f"vertex {v} is not in the graph")
    pa, pb = R(int(a)), R(int(b))
    comps = g.components()
    if len(comps) > 1:
        mine = next(c for c in comps if v in c)
        head = label_pinned(wg.restrict(mine), v, pa, pb, budget)
        rest = [x for c in comps if c is not mine for x in c]
        if not isinstance(head, Labeled) or not rest:
            return head
        tail = label_general(wg.restrict(rest))
        if not isinstance(tail, Labeled):
            return tail
        return Labeled(_checked(wg, {**head.labeling, **tail.labeling}), head.route + "+" + tail.route)
    prox = find_unfavorable_proximities(wg, first_only=True)
    if prox:
        return NoSolution(prox[0], "proximity")
    if R.p >= 3 and (pa.is_unit() or pb.is_unit()) and not (g.is_cycle() and len(g.vertex_set) == 3):
        attempts = []
        if is_borderless(g)[0]:
            attempts.append(("borderless", lambda: label_borderless(wg, u=v, a=pa, b=pb, search_budget=0)))
        if pa.is_unit() and is_net(g):
            attempts.append(("net", lambda: label_net(wg, s=v, a=pa, b=pb)))
        if not find_bad_cycles(g):
            for route, run in attempts:
                try:
                    lab = run()
                except (PreconditionError, ClauseError, RingError):
                    continue
                if lab[v] == (pa, pb):
                    return Labeled(_checked(wg, lab), route)
    res = oracle_solve(wg, budget, lambda u, x, y: (x, y) == (pa.value, pb.value) if u == v else True)
    if isinstance(res, OracleLabeled):
        return Labeled(_checked(wg, res.labeling), "pinned-search")
    if isinstance(res, BudgetExceeded):
        return Unknown("pinned search exceeded its budget", "pinned-search")
    return NoSolution(OracleExhaustion(res.nodes), "pinned-search")

"""Finite class-2 p-groups in normal form, and commutator questions about them.

An element is g_1^{a_1} ... g_n^{a_n} * z with z central, written over a fixed
basis of the derived subgroup. The commutator [g_i, g_j] of an adjacent pair is
a fixed vector of that basis (the standard graph groups use one basis vector
per edge).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from math import comb
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from .classify import ProximityReport, find_bad_cycles, find_unfavorable_proximities
from .graph import Edge, Graph, WeightedGraph, edge_key
from .label import Labeled, NoSolution, OracleExhaustion, Unknown, label_general
from .ring import RingSpec, is_prime


class GroupError(ValueError):
    pass


class BudgetError(GroupError):
    pass


@dataclass(frozen=True)
class Class2Presentation:
    p: int
    r: int
    n: int
    gen_orders: Tuple[int, ...]
    basis_orders: Tuple[int, ...]
    # (i, j) with i < j -> exponent vector of [g_i, g_j] over the basis
    commutators: Mapping[Edge, Tuple[int, ...]]

    def __post_init__(self):
        if not is_prime(self.p) or self.r < 1:
            raise GroupError("need a prime p and r >= 1")
        if len(self.gen_orders) != self.n:
            raise GroupError("one order per generator")
        comm = {}
        for (i, j), vec in dict(self.commutators).items():
            i, j = edge_key(i, j)
            if not (1 <= i < j <= self.n) or len(vec) != len(self.basis_orders):
                raise GroupError(f"bad commutator entry for {(i, j)}")
            vec = tuple(x % o for x, o in zip(vec, self.basis_orders))
            if any(vec):
                comm[(i, j)] = vec
        object.__setattr__(self, "commutators", comm)

    @property
    def graph(self) -> Graph:
        return Graph.from_edges(self.commutators.keys(), self.n)

    @property
    def independent(self) -> bool:
        """Whether the commutators of adjacent pairs are exactly the basis vectors."""
        vecs = sorted(self.commutators.values())
        k = len(self.basis_orders)
        unit = sorted(tuple(1 if t == s else 0 for t in range(k)) for s in range(k))
        return vecs == unit

    def identity(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.n, (0,) * len(self.basis_orders))

    def generator(self, i: int) -> "GroupElement":
        a = [0] * self.n
        a[i - 1] = 1
        return GroupElement(self, tuple(a), (0,) * len(self.basis_orders))

    def element(self, gen_exponents: Sequence[int], central: Optional[Sequence[int]] = None) -> "GroupElement":
        central = central if central is not None else (0,) * len(self.basis_orders)
        return GroupElement(self, tuple(gen_exponents), tuple(central))

    def central(self, vec: Sequence[int]) -> "GroupElement":
        return self.element((0,) * self.n, vec)

    def edge_basis(self) -> List[Edge]:
        """Edge behind each basis coordinate (independent presentations only)."""
        if not self.independent:
            raise GroupError("commutators are not a basis")
        out: List[Edge] = [None] * len(self.basis_orders)  # type: ignore[list-item]
        for e, vec in self.commutators.items():
            out[vec.index(1)] = e
        return out

    def central_from_edges(self, exps: Mapping[Edge, int]) -> "GroupElement":
        """Central element prod c_{i,j}^{exps[(i,j)]}, keyed by edge."""
        vec = [0] * len(self.basis_orders)
        for e, x in exps.items():
            vec[self.edge_basis().index(edge_key(*e))] = x
        return self.central(vec)

    def edge_exponents(self, x: "GroupElement") -> Dict[Edge, int]:
        return dict(zip(self.edge_basis(), x.central_exponents))

    def _cocycle(self, a: Sequence[int], b: Sequence[int]) -> List[int]:
        # moving g_i^{b_i} left past g_j^{a_j} (i < j) leaves [g_j, g_i]^{a_j b_i}
        out = [0] * len(self.basis_orders)
        for (i, j), vec in self.commutators.items():
            k = a[j - 1] * b[i - 1]
            if k:
                for t, x in enumerate(vec):
                    out[t] -= k * x
        return out

    def _bracket(self, a: Sequence[int], b: Sequence[int]) -> List[int]:
        out = [0] * len(self.basis_orders)
        for (i, j), vec in self.commutators.items():
            k = a[i - 1] * b[j - 1] - a[j - 1] * b[i - 1]
            if k:
                for t, x in enumerate(vec):
                    out[t] += k * x
        return out

    @property
    def order(self) -> int:
        out = 1
        for o in self.gen_orders + self.basis_orders:
            out *= o
        return out

    def derived_order(self) -> int:
        out = 1
        for o in self.basis_orders:
            out *= o
        return out

    def to_json(self) -> dict:
        return {"p": self.p, "r": self.r, "n": self.n, "gen_orders": list(self.gen_orders),
                "basis_orders": list(self.basis_orders),
                "commutators": [{"i": i, "j": j, "vector": list(v)} for (i, j), v in sorted(self.commutators.items())]}

    @classmethod
    def from_json(cls, data: dict) -> "Class2Presentation":
        return cls(data["p"], data["r"], data["n"], tuple(data["gen_orders"]), tuple(data["basis_orders"]),
                   {(c["i"], c["j"]): tuple(c["vector"]) for c in data["commutators"]})


@dataclass(frozen=True)
class GroupElement:
    pres: Class2Presentation
    gen_exponents: Tuple[int, ...]
    central_exponents: Tuple[int, ...]

    def __post_init__(self):
        P = self.pres
        object.__setattr__(self, "gen_exponents",
                           tuple(x % o for x, o in zip(self.gen_exponents, P.gen_orders)))
        object.__setattr__(self, "central_exponents",
                           tuple(x % o for x, o in zip(self.central_exponents, P.basis_orders)))

    def _check(self, other: "GroupElement"):
        if other.pres is not self.pres and other.pres != self.pres:
            raise GroupError("elements of different presentations")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return mul(self, other)

    def is_central(self) -> bool:
        return not any(self.gen_exponents)

    def key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return self.gen_exponents, self.central_exponents


def mul(x: GroupElement, y: GroupElement) -> GroupElement:
    x._check(y)
    P = x.pres
    a = [u + v for u, v in zip(x.gen_exponents, y.gen_exponents)]
    corr = P._cocycle(x.gen_exponents, y.gen_exponents)
    z = [u + v + c for u, v, c in zip(x.central_exponents, y.central_exponents, corr)]
    return GroupElement(P, tuple(a), tuple(z))


def power(x: GroupElement, m: int) -> GroupElement:
    """x^m for m >= 0 via (g^a z)^m = g^{ma} z^m c(a, a)^{C(m, 2)}."""
    if m < 0:
        return power(inv(x), -m)
    P = x.pres
    corr = P._cocycle(x.gen_exponents, x.gen_exponents)
    c2 = comb(m, 2)
    z = [m * u + c2 * c for u, c in zip(x.central_exponents, corr)]
    return GroupElement(P, tuple(m * u for u in x.gen_exponents), tuple(z))


def inv(x: GroupElement) -> GroupElement:
    P = x.pres
    corr = P._cocycle(x.gen_exponents, x.gen_exponents)
    return GroupElement(P, tuple(-u for u in x.gen_exponents),
                        tuple(-u + c for u, c in zip(x.central_exponents, corr)))


def commutator(x: GroupElement, y: GroupElement) -> GroupElement:
    """[x, y] = x^-1 y^-1 x y; in class 2 it only depends on the generator exponents."""
    x._check(y)
    P = x.pres
    return GroupElement(P, (0,) * P.n, tuple(P._bracket(x.gen_exponents, y.gen_exponents)))


def commutator_by_collection(x: GroupElement, y: GroupElement) -> GroupElement:
    return mul(mul(inv(x), inv(y)), mul(x, y))


# ---------------------------------------------------------------- graph groups

def group_from_graph(g: Graph, p: int, r: int) -> Class2Presentation:
    """The class-2 group of a graph: adjacent generators have a central commutator,
    non-adjacent ones commute, g_1 and g_2 have order p^r, the others order p."""
    if not g.edges:
        raise GroupError("graph has no edges")
    if not g.is_connected():
        raise GroupError("graph must be connected")
    if g.vertex_set != set(range(1, g.n + 1)):
        raise GroupError("vertices must be 1..n with no isolated vertex")
    if not is_prime(p) or r < 1:
        raise GroupError("need a prime p and r >= 1")
    n = g.n
    gen = tuple(p ** r if i <= 2 else p for i in range(1, n + 1))
    edges = g.sorted_edges()
    basis = tuple(p ** r if e == (1, 2) else p for e in edges)
    comm = {e: tuple(1 if t == s else 0 for t in range(len(edges))) for s, e in enumerate(edges)}
    return Class2Presentation(p, r, n, gen, basis, comm)


def formula_sizes(g: Graph, p: int, r: int) -> dict:
    """Sizes the construction promises (assuming the edge {1, 2} is present)."""
    E, V = len(g.edges), len(g.vertex_set)
    return {"order": p ** (E + V + 3 * r - 3), "derived": p ** (E + r - 1),
            "center": p ** (E + r - 1), "quotient": p ** (V + 2 * r - 2),
            "exponent": p ** r if p != 2 else 2 ** (r + 1)}


def enumerate_closure(gens: Sequence[GroupElement], budget: int = 10**6) -> Set[tuple]:
    """Keys of the subgroup generated by gens (BFS under right multiplication)."""
    if not gens:
        raise GroupError("need at least one generator")
    start = gens[0].pres.identity()
    seen = {start.key()}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mul(x, g)
            k = y.key()
            if k not in seen:
                seen.add(k)
                if len(seen) > budget:
                    raise BudgetError(f"more than {budget} elements")
                queue.append(y)
    return seen


def element_order(x: GroupElement) -> int:
    k, y = 1, x
    ident = x.pres.identity().key()
    while y.key() != ident:
        y = mul(y, x)
        k += 1
    return k


def group_statistics(pres: Class2Presentation, budget: int = 10**6) -> dict:
    """Element count, derived-subgroup size and exponent, all by enumeration."""
    gens = [pres.generator(i) for i in range(1, pres.n + 1)]
    elems = enumerate_closure(gens, budget)
    comms = [commutator(gens[i - 1], gens[j - 1]) for (i, j) in sorted(pres.commutators)]
    derived = enumerate_closure(comms, budget) if comms else {pres.identity().key()}
    exp = 1
    for a, z in elems:
        exp = max(exp, element_order(GroupElement(pres, a, z)))
    return {"order": len(elems), "derived": len(derived), "exponent": exp}


# ---------------------------------------------------------------- commutator membership

@dataclass(frozen=True)
class PresentationD:
    d: Mapping[Edge, int]
    support: Tuple[int, ...]


@dataclass(frozen=True)
class Witness:
    g: GroupElement
    h: GroupElement
    route: str = ""


@dataclass(frozen=True)
class NotACommutator:
    certificate: object
    route: str = ""


@dataclass(frozen=True)
class GroupUnknown:
    reason: str


def _d_graph(pres: Class2Presentation, d: Mapping[Edge, int]) -> Tuple[PresentationD, Optional[WeightedGraph]]:
    support = sorted({v for e, x in d.items() if x for v in e})
    ring = RingSpec(pres.p, pres.r)
    sup = set(support)
    weights = {e: d.get(e, 0) for e in pres.commutators if e[0] in sup and e[1] in sup}
    pd = PresentationD(dict(d), tuple(support))
    if not weights:
        return pd, None
    return pd, WeightedGraph.build(ring, weights, pres.n)


def build_presentation_D(pres: Class2Presentation, target: GroupElement) -> Tuple[PresentationD, Optional[WeightedGraph]]:
    """The weighted graph on the support of the target's commutator exponents."""
    if not target.is_central():
        raise GroupError("target is not central")
    if not pres.independent:
        raise GroupError("presentation commutators are not a basis; use d_vectors()")
    return _d_graph(pres, pres.edge_exponents(target))


def d_vectors(pres: Class2Presentation, target: GroupElement, budget: int = 10**5) -> Iterator[Dict[Edge, int]]:
    """Every exponent assignment on adjacent pairs whose product of commutators is the target."""
    edges = sorted(pres.commutators)
    ranges = []
    for (i, j) in edges:
        ranges.append(range(min(pres.gen_orders[i - 1], pres.gen_orders[j - 1])))
    total = 1
    for rg in ranges:
        total *= len(rg)
    if total > budget:
        raise BudgetError(f"{total} candidate d-vectors exceed the budget {budget}")
    want = list(target.central_exponents)
    for combo in itertools.product(*ranges):
        acc = [0] * len(pres.basis_orders)
        for x, e in zip(combo, edges):
            for t, y in enumerate(pres.commutators[e]):
                acc[t] += x * y
        if all((u - w) % o == 0 for u, w, o in zip(acc, want, pres.basis_orders)):
            yield dict(zip(edges, combo))


def _lift(pres: Class2Presentation, lab) -> Tuple[GroupElement, GroupElement]:
    a = [0] * pres.n
    b = [0] * pres.n
    for v, (x, y) in lab.items():
        a[v - 1], b[v - 1] = x.value, y.value
    return pres.element(a), pres.element(b)


def _search_pair(pres: Class2Presentation, target: GroupElement, budget: int):
    """Exact backtracking over generator exponents modulo the generator orders."""
    verts = sorted({v for e in pres.commutators for v in e})
    pos = {v: k for k, v in enumerate(verts)}
    want = target.central_exponents
    basis = pres.basis_orders
    # an edge's contribution is settled once both endpoints are assigned
    settle: List[List[Edge]] = [[] for _ in verts]
    for e in pres.commutators:
        settle[max(pos[e[0]], pos[e[1]])].append(e)
    a = [0] * pres.n
    b = [0] * pres.n
    nodes = [0]
    exceeded = [False]
    # a coordinate is checked once every edge touching it is settled
    last_for = [0] * len(basis)
    for e, vec in pres.commutators.items():
        for t, x in enumerate(vec):
            if x:
                last_for[t] = max(last_for[t], max(pos[e[0]], pos[e[1]]))

    def go(k, acc):
        if k == len(verts):
            return all((u - w) % o == 0 for u, w, o in zip(acc, want, basis))
        v = verts[k]
        o = pres.gen_orders[v - 1]
        for x in range(o):
            for y in range(o):
                nodes[0] += 1
                if nodes[0] > budget:
                    exceeded[0] = True
                    return False
                a[v - 1], b[v - 1] = x, y
                new = list(acc)
                for (i, j) in settle[k]:
                    c = a[i - 1] * b[j - 1] - a[j - 1] * b[i - 1]
                    if c:
                        for t, z in enumerate(pres.commutators[(i, j)]):
                            new[t] += c * z
                if any(last_for[t] == k and (new[t] - want[t]) % basis[t] for t in range(len(basis))):
                    continue
                if go(k + 1, new):
                    return True
        a[verts[k] - 1] = b[verts[k] - 1] = 0
        return False

    found = go(0, [0] * len(basis))
    if found:
        return pres.element(a), pres.element(b)
    return "exceeded" if exceeded[0] else nodes[0]


def decide_commutator(pres: Class2Presentation, target: GroupElement, budget: int = 10**6):
    """Witness (g, h) with [g, h] = target, NotACommutator with a certificate, or unknown."""
    if not target.is_central():
        raise GroupError("target is not central")
    if not any(target.central_exponents):
        e = pres.identity()
        return Witness(e, e, "identity")
    if pres.independent:
        candidates = [build_presentation_D(pres, target)[0].d]
    else:
        try:
            candidates = list(d_vectors(pres, target))
        except BudgetError as exc:
            return GroupUnknown(str(exc))
    certs = []
    for d in candidates:
        _, wg = _d_graph(pres, d)
        if wg is None:
            continue
        out = label_general(wg)
        if isinstance(out, Labeled):
            g, h = _lift(pres, out.labeling)
            if commutator(g, h) == target:
                return Witness(g, h, "labeling")
        elif isinstance(out, NoSolution) and isinstance(out.certificate, ProximityReport):
            # residue patterns do not depend on how the exponents are lifted
            certs.append(out.certificate)
            continue
        certs.append(None)
    if candidates and all(c is not None for c in certs):
        return NotACommutator(certs[0] if len(certs) == 1 else tuple(certs), "proximity")
    found = _search_pair(pres, target, budget)
    if found == "exceeded":
        return GroupUnknown("no construction applies and the exact search exceeded its budget")
    if isinstance(found, int):
        return NotACommutator(OracleExhaustion(found), "exhaustive")
    return Witness(found[0], found[1], "search")


def commutator_image(pres: Class2Presentation, budget: int = 10**7) -> Set[Tuple[int, ...]]:
    """All central exponent vectors of commutators, by enumerating pairs modulo the center."""
    verts = list(range(1, pres.n + 1))
    space = 1
    for o in pres.gen_orders:
        space *= o
    if space * space > budget:
        raise BudgetError(f"{space * space} pairs exceed the budget {budget}")
    out = set()
    vecs = list(itertools.product(*[range(o) for o in pres.gen_orders]))
    for a in vecs:
        for b in vecs:
            acc = pres._bracket(a, b)
            out.add(tuple(x % o for x, o in zip(acc, pres.basis_orders)))
    return out


def derived_box(pres: Class2Presentation) -> Set[Tuple[int, ...]]:
    return set(itertools.product(*[range(o) for o in pres.basis_orders]))


@dataclass(frozen=True)
class MissingElement:
    target: Tuple[int, ...]
    certificate: object


def missing_from_bad_cycle(pres: Class2Presentation) -> Optional[MissingElement]:
    """An element of G' outside K(G): unit exponents on the low-degree edge and on
    one attachment edge per high-degree cycle vertex, zero elsewhere."""
    if not pres.independent:
        return None
    g = pres.graph
    for bad in find_bad_cycles(g):
        lay = bad.layout
        r = len(lay)
        options = []
        for u in lay[:r - 2]:
            outs = [a for a in g.neighbors(u) if a not in lay]
            if not outs:
                break
            options.append(outs)
        else:
            for combo in itertools.product(*options):
                S = {edge_key(lay[r - 2], lay[r - 1])} | {edge_key(u, a) for u, a in zip(lay[:r - 2], combo)}
                if len(S) != r - 1:
                    continue
                tgt = pres.central_from_edges({e: 1 for e in S})
                vec = tgt.central_exponents
                _, wg = build_presentation_D(pres, tgt)
                prox = find_unfavorable_proximities(wg, first_only=True)
                if prox:
                    return MissingElement(tuple(vec), prox[0])
    return None


def full_image_check(pres: Class2Presentation, budget: int = 10**6):
    """K(G) = G' ?  Returns True, a MissingElement, or GroupUnknown."""
    miss = missing_from_bad_cycle(pres)
    if miss is not None:
        return miss
    box = sorted(derived_box(pres))
    if len(box) > budget:
        return GroupUnknown("derived subgroup too large to decide element by element")
    for vec in box:
        out = decide_commutator(pres, pres.central(vec), budget)
        if isinstance(out, NotACommutator):
            return MissingElement(vec, out.certificate)
        if isinstance(out, GroupUnknown):
            return GroupUnknown(f"undecided at {vec}: {out.reason}")
    return True


# ---------------------------------------------------------------- family of examples

def max_edges_with_bad_cycle(n: int) -> int:
    """Largest edge count of a connected graph on n >= 4 vertices with a bad cycle:
    a triangle with two degree-2 vertices hanging on a complete graph of the rest."""
    return comb(n - 2, 2) + 3


def family_graph(n: int, m: int) -> Graph:
    edges = [(i, i + 1) for i in range(1, n)] + [(1, 3)]
    current = Graph.from_edges(edges, n)
    for i, j in itertools.combinations(range(1, n + 1), 2):
        if len(current.edges) >= m:
            break
        if current.has_edge(i, j):
            continue
        trial = Graph.from_edges(list(current.edges) + [(i, j)], n)
        if find_bad_cycles(trial):
            current = trial
    if len(current.edges) != m:
        raise GroupError(f"could not reach {m} edges while keeping a bad cycle")
    return current


def construct_family_example(p: int, r: int, s: int, t: int) -> Tuple[Class2Presentation, dict]:
    """A graph group with |G| = p^t, |G'| = p^s, exponent p^r (2^{r+1} for p = 2) and K(G) != G'."""
    m = s - r + 1
    n = t - s - 2 * r + 2
    if n < 4:
        raise GroupError(f"n = t - s - 2r + 2 = {n} is below 4")
    if m < n:
        raise GroupError(f"m = s - r + 1 = {m} is below n = {n}")
    if m > n * (n - 1) // 2:
        raise GroupError(f"m = {m} exceeds n(n-1)/2 = {n * (n - 1) // 2}")
    if m > max_edges_with_bad_cycle(n):
        raise GroupError(f"m = {m} exceeds C(n-2, 2) + 3 = {max_edges_with_bad_cycle(n)}: "
                         f"no connected graph with {n} vertices and {m} edges has a bad cycle")
    g = family_graph(n, m)
    pres = group_from_graph(g, p, r)
    info = formula_sizes(g, p, r)
    info.update({"n": n, "m": m, "edges": [list(e) for e in g.sorted_edges()], "k_equals_derived": False})
    return pres, info


def dependent_commutator_group(p: int) -> Class2Presentation:
    """Four generators of order p where [g1,g2] = [g1,g3] = [g1,g4] = [g2,g3] generate
    a cyclic derived subgroup and the other pairs commute."""
    one = (1,)
    return Class2Presentation(p, 1, 4, (p,) * 4, (p,),
                              {(1, 2): one, (1, 3): one, (1, 4): one, (2, 3): one})

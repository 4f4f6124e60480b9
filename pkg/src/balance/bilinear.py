"""Image membership for alternating bilinear maps U x U -> W over F_p.

The map is given by structure vectors c_{i,j} = B(u_i, u_j) for i < j, so
B(u, v) = sum (a_i b_j - a_j b_i) c_{i,j} for u = sum a_i u_i, v = sum b_i u_i.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from .classify import ProximityReport, find_bad_cycles, find_unfavorable_proximities
from .graph import Edge, Graph, WeightedGraph, edge_key
from .groups import Class2Presentation, _search_pair
from .label import Labeled, NoSolution, label_general
from .ring import RingSpec, is_prime

Vector = Tuple[int, ...]


class BilinearError(ValueError):
    pass


class WNotSpanned(BilinearError):
    pass


def _rref(rows: List[List[int]], p: int) -> Tuple[List[List[int]], List[int]]:
    rows = [list(r) for r in rows]
    pivots: List[int] = []
    lead = 0
    width = len(rows[0]) if rows else 0
    for col in range(width):
        pivot = next((k for k in range(lead, len(rows)) if rows[k][col] % p), None)
        if pivot is None:
            continue
        rows[lead], rows[pivot] = rows[pivot], rows[lead]
        inv = pow(rows[lead][col], -1, p)
        rows[lead] = [x * inv % p for x in rows[lead]]
        for k in range(len(rows)):
            if k != lead and rows[k][col] % p:
                f = rows[k][col]
                rows[k] = [(x - f * y) % p for x, y in zip(rows[k], rows[lead])]
        pivots.append(col)
        lead += 1
    return rows, pivots


def rank(vectors: Sequence[Sequence[int]], p: int) -> int:
    if not vectors:
        return 0
    return len(_rref([list(v) for v in vectors], p)[1])


@dataclass(frozen=True)
class AlternatingMap:
    p: int
    n: int
    m: int
    structure: Mapping[Edge, Vector]

    def __post_init__(self):
        if not is_prime(self.p):
            raise BilinearError(f"{self.p} is not prime")
        clean = {}
        for (i, j), vec in dict(self.structure).items():
            if i == j or not (1 <= min(i, j) and max(i, j) <= self.n):
                raise BilinearError(f"bad index pair {(i, j)}")
            if len(vec) != self.m:
                raise BilinearError(f"vector for {(i, j)} has length {len(vec)}, expected {self.m}")
            sign = 1 if i < j else -1
            vec = tuple(sign * x % self.p for x in vec)
            if any(vec):
                clean[edge_key(i, j)] = vec
        object.__setattr__(self, "structure", clean)
        if rank(list(clean.values()), self.p) != self.m:
            raise WNotSpanned("structure vectors do not span W")

    @property
    def pairs(self) -> List[Edge]:
        return sorted(self.structure)

    @property
    def is_basis(self) -> bool:
        return len(self.structure) == self.m

    def support_graph(self) -> Graph:
        return Graph.from_edges(self.pairs, self.n)

    def evaluate(self, u: Sequence[int], v: Sequence[int]) -> Vector:
        out = [0] * self.m
        for (i, j), vec in self.structure.items():
            k = u[i - 1] * v[j - 1] - u[j - 1] * v[i - 1]
            if k:
                for t, x in enumerate(vec):
                    out[t] += k * x
        return tuple(x % self.p for x in out)

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "m": self.m,
                "entries": [{"i": i, "j": j, "vec": list(v)} for (i, j), v in sorted(self.structure.items())]}

    @classmethod
    def from_json(cls, data: dict) -> "AlternatingMap":
        return cls(data["p"], data["n"], data["m"],
                   {(e["i"], e["j"]): tuple(e["vec"]) for e in data["entries"]})

    @classmethod
    def free_on(cls, g: Graph, p: int) -> "AlternatingMap":
        """Basis structure on a support graph: one coordinate per edge, in sorted edge order."""
        edges = g.sorted_edges()
        k = len(edges)
        return cls(p, g.n, k, {e: tuple(1 if t == s else 0 for t in range(k)) for s, e in enumerate(edges)})


@dataclass(frozen=True)
class Witness:
    u: Vector
    v: Vector
    route: str = ""


@dataclass(frozen=True)
class NotInImage:
    certificate: object
    route: str = ""


@dataclass(frozen=True)
class Unknown:
    reason: str


@dataclass(frozen=True)
class FullImage:
    pass


@dataclass(frozen=True)
class MissingElement:
    w: Vector
    certificate: object = None


def presentations(bmap: AlternatingMap, w: Sequence[int], cap: int = 10**5) -> Iterator[Dict[Edge, int]]:
    """Every d-vector (one coefficient per pair) with sum d_{i,j} c_{i,j} = w: a particular
    solution plus combinations of a kernel basis."""
    p, pairs = bmap.p, bmap.pairs
    k = len(pairs)
    # columns are the structure vectors; solve C d = w
    aug = [[bmap.structure[e][t] for e in pairs] + [w[t] % p] for t in range(bmap.m)]
    red, piv = _rref(aug, p)
    if k in piv:
        return
    free = [c for c in range(k) if c not in piv]
    if p ** len(free) > cap:
        raise BilinearError(f"{p ** len(free)} presentations exceed the cap {cap}")
    for combo in itertools.product(range(p), repeat=len(free)):
        d = [0] * k
        for c, x in zip(free, combo):
            d[c] = x
        for row, c in zip(red, piv):
            d[c] = (row[k] - sum(row[f] * d[f] for f in free)) % p
        yield dict(zip(pairs, d))


def _as_presentation(bmap: AlternatingMap) -> Class2Presentation:
    return Class2Presentation(bmap.p, 1, bmap.n, (bmap.p,) * bmap.n, (bmap.p,) * bmap.m, dict(bmap.structure))


def _d_graph(bmap: AlternatingMap, d: Mapping[Edge, int]) -> Optional[WeightedGraph]:
    sup = {v for e, x in d.items() if x % bmap.p for v in e}
    weights = {e: d[e] for e in bmap.pairs if e[0] in sup and e[1] in sup}
    if not weights:
        return None
    return WeightedGraph.build(RingSpec(bmap.p), weights, bmap.n)


def image_membership(bmap: AlternatingMap, w: Sequence[int], budget: int = 10**6, cap: int = 10**5):
    """Witness (u, v) with B(u, v) = w, NotInImage with a certificate, or Unknown."""
    p = bmap.p
    w = tuple(x % p for x in w)
    if len(w) != bmap.m:
        raise BilinearError(f"target has length {len(w)}, expected {bmap.m}")
    if not any(w):
        z = (0,) * bmap.n
        return Witness(z, z, "zero")
    if p != 2:
        try:
            ds = list(presentations(bmap, w, cap))
        except BilinearError as exc:
            ds, capped = [], str(exc)
        else:
            capped = ""
        certs: List[Optional[ProximityReport]] = []
        for d in ds:
            wg = _d_graph(bmap, d)
            out = label_general(wg)
            if isinstance(out, Labeled):
                u = [0] * bmap.n
                v = [0] * bmap.n
                for x, (a, b) in out.labeling.items():
                    u[x - 1], v[x - 1] = a.value, b.value
                if bmap.evaluate(u, v) == w:
                    return Witness(tuple(u), tuple(v), "labeling")
            if isinstance(out, NoSolution) and isinstance(out.certificate, ProximityReport):
                certs.append(out.certificate)
            else:
                certs.append(None)
        if ds and not capped and all(c is not None for c in certs):
            return NotInImage(certs[0] if len(certs) == 1 else tuple(certs), "proximity")
    pres = _as_presentation(bmap)
    found = _search_pair(pres, pres.central(w), budget)
    if found == "exceeded":
        return Unknown("no construction applies and the exact search exceeded its budget")
    if isinstance(found, int):
        return NotInImage(found, "exhaustive")
    g, h = found
    return Witness(g.gen_exponents, h.gen_exponents, "search")


def attainable_vectors(bmap: AlternatingMap, budget: int = 10**7) -> Set[Vector]:
    """B(U x U) by direct expansion over every pair of coordinate vectors."""
    p, n = bmap.p, bmap.n
    if p ** (2 * n) > budget:
        raise BilinearError(f"{p ** (2 * n)} pairs exceed the budget {budget}")
    vecs = list(itertools.product(range(p), repeat=n))
    return {bmap.evaluate(u, v) for u in vecs for v in vecs}


def attainable_d_vectors(bmap: AlternatingMap, budget: int = 10**7) -> Set[Vector]:
    """For a basis structure: coefficient vectors (in sorted pair order) of the image."""
    if not bmap.is_basis:
        raise BilinearError("structure vectors are not a basis")
    pairs = bmap.pairs
    out = set()
    for w in attainable_vectors(bmap, budget):
        d = next(presentations(bmap, w))
        out.add(tuple(d[e] for e in pairs))
    return out


def missing_from_bad_cycle(bmap: AlternatingMap) -> Optional[MissingElement]:
    """Sum of c over the low-degree edge and one attachment edge per high-degree
    cycle vertex; not in the image when that proximity is unfavorable."""
    g = bmap.support_graph()
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
                w = [0] * bmap.m
                for e in S:
                    for t, x in enumerate(bmap.structure[e]):
                        w[t] += x
                w = tuple(x % bmap.p for x in w)
                d = next(presentations(bmap, w))
                prox = find_unfavorable_proximities(_d_graph(bmap, d), first_only=True)
                if prox:
                    return MissingElement(w, prox[0])
    return None


def full_image_check(bmap: AlternatingMap, budget: int = 10**7):
    """FullImage, a MissingElement, or Unknown when enumeration is out of budget."""
    if not bmap.is_basis:
        raise BilinearError("structure vectors are not a basis")
    if bmap.p != 2:
        miss = missing_from_bad_cycle(bmap)
        if miss is not None:
            return miss
    try:
        image = attainable_vectors(bmap, budget)
    except BilinearError as exc:
        return Unknown(str(exc))
    for w in itertools.product(range(bmap.p), repeat=bmap.m):
        if w not in image:
            return MissingElement(w, "enumeration")
    return FullImage()

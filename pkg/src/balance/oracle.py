"""Brute-force backtracking solver for balance-equation systems, used as ground truth."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .graph import WeightedGraph, edge_key

DEFAULT_ORACLE_BUDGET = 10**8


@dataclass(frozen=True)
class Labeled:
    labeling: dict


@dataclass(frozen=True)
class Unsolvable:
    nodes: int


@dataclass(frozen=True)
class BudgetExceeded:
    budget: int


def search_order(wg: WeightedGraph) -> List[int]:
    """BFS order from the lowest vertex of each component."""
    order: List[int] = []
    seen = set()
    for root in wg.vertices:
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in wg.base.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    return order


class _Search:
    def __init__(self, wg: WeightedGraph, budget: int,
                 allowed: Optional[Callable[[int, int, int], bool]] = None):
        if budget <= 0:
            raise ValueError("budget must be positive")
        self.wg = wg
        self.mod = wg.ring.modulus
        self.budget = budget
        self.allowed = allowed
        self.order = search_order(wg)
        pos = {v: i for i, v in enumerate(self.order)}
        # for each vertex, the earlier neighbours with the oriented weight w(u, v)
        self.back: List[List[Tuple[int, int]]] = []
        for v in self.order:
            back = []
            for u in wg.base.neighbors(v):
                if pos[u] < pos[v]:
                    back.append((pos[u], wg.w(u, v).value))
            self.back.append(back)
        self.nodes = 0
        self.exceeded = False

    def run(self, count: bool) -> Tuple[int, Optional[List[Tuple[int, int]]]]:
        n, mod = len(self.order), self.mod
        alpha = [0] * n
        beta = [0] * n
        total = 0
        found: Optional[List[Tuple[int, int]]] = None
        # explicit stack of (index, next value code) to avoid recursion limits
        stack = [0]
        i = 0
        while i >= 0:
            if i == n:
                total += 1
                if not count:
                    found = list(zip(alpha, beta))
                    break
                i -= 1
                continue
            code = stack[i]
            placed = False
            back = self.back[i]
            v = self.order[i]
            while code < mod * mod:
                a, b = divmod(code, mod)
                code += 1
                self.nodes += 1
                if self.nodes > self.budget:
                    self.exceeded = True
                    return total, None
                if all((alpha[u] * b - a * beta[u] - w) % mod == 0 for u, w in back) and \
                        (self.allowed is None or self.allowed(v, a, b)):
                    alpha[i], beta[i] = a, b
                    placed = True
                    break
            stack[i] = code
            if placed:
                i += 1
                if i < n:
                    if len(stack) <= i:
                        stack.append(0)
                    stack[i] = 0
            else:
                stack[i] = 0
                i -= 1
        return total, found


def oracle_solve(wg: WeightedGraph, budget: int = DEFAULT_ORACLE_BUDGET,
                 allowed: Optional[Callable[[int, int, int], bool]] = None):
    """First consistent labeling in (BFS vertex order, alpha then beta ascending) order.

    `allowed(vertex, alpha, beta)` optionally restricts each vertex's candidate pairs.
    """
    s = _Search(wg, budget, allowed)
    _, found = s.run(count=False)
    if s.exceeded:
        return BudgetExceeded(budget)
    if found is None:
        return Unsolvable(s.nodes)
    R = wg.ring
    return Labeled({v: (R(a), R(b)) for v, (a, b) in zip(s.order, found)})


def oracle_count(wg: WeightedGraph, budget: int = DEFAULT_ORACLE_BUDGET):
    s = _Search(wg, budget)
    total, _ = s.run(count=True)
    if s.exceeded:
        return BudgetExceeded(budget)
    return total

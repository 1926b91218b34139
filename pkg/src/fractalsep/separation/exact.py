"""Exact cut^epsilon by iterative-deepening branch and bound.

The search rests on one observation: if the current residual graph has a
connected vertex set T with more than ``limit`` vertices, every valid cutset
extending the current one must delete a vertex of T.  Branching over the
deletable vertices of such a T, with earlier siblings marked undeletable,
enumerates every candidate exactly once.
"""

from __future__ import annotations

import time
from collections import deque
from itertools import combinations
from typing import Sequence

from ..fractal_core import LevelGraph
from .components import components_adj
from .result import CutResult, size_limit

DEFAULT_NODE_LIMIT = 2_000_000


class _Budget(Exception):
    pass


def _residual_components(adj, removed: set[int]) -> list[list[int]]:
    seen = set(removed)
    comps = []
    for s in range(len(adj)):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        q = deque([s])
        while q:
            u = q.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    comp.append(v)
                    q.append(v)
        comps.append(comp)
    return comps


def _deletions_needed(size: int, limit: int, max_deg: int) -> int:
    # r deletions leave at most 1 + r*(max_deg - 1) pieces, each <= limit
    if size <= limit:
        return 0
    if limit == 0:
        return size
    denom = limit * max(max_deg - 1, 0) + 1
    return -(-(size - limit) // denom)


class _Search:
    def __init__(self, adj: list[list[int]], limit: int, node_limit: int, deadline: float | None):
        self.adj = adj
        self.limit = limit
        self.node_limit = node_limit
        self.deadline = deadline
        self.nodes = 0
        self.deg = [len(a) for a in adj]

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise _Budget
        if self.deadline is not None and self.nodes % 1024 == 0 and time.monotonic() > self.deadline:
            raise _Budget

    def _hitting_set(self, comp: list[int], forbidden: set[int]) -> list[int]:
        """Connected subset of ``comp`` with limit+1 vertices, soaking up forbidden ones first."""
        in_comp = set(comp)
        start = min((v for v in comp if v in forbidden), default=None)
        if start is None:
            start = min(comp, key=lambda v: (-self.deg[v], v))
        taken = {start}
        order = [start]
        q = deque([start])
        need = self.limit + 1
        while q and len(order) < need:
            u = q.popleft()
            for v in sorted(self.adj[u], key=lambda v: (v not in forbidden, -self.deg[v], v)):
                if v in taken or v not in in_comp:
                    continue
                taken.add(v)
                order.append(v)
                if v in forbidden:
                    q.appendleft(v)
                else:
                    q.append(v)
                if len(order) >= need:
                    break
        return order

    def feasible(self, removed: set[int], forbidden: set[int], budget: int) -> list[int] | None:
        self._tick()
        comps = _residual_components(self.adj, removed)
        big = [c for c in comps if len(c) > self.limit]
        if not big:
            return sorted(removed)
        lb = 0
        for c in big:
            lb += _deletions_needed(len(c), self.limit, max(self.deg[v] for v in c))
        if lb > budget:
            return None
        target = max(big, key=lambda c: (len(c), -min(c)))
        T = self._hitting_set(target, forbidden)
        branch = sorted((v for v in T if v not in forbidden), key=lambda v: (-self.deg[v], v))
        banned = set(forbidden)
        for v in branch:
            removed.add(v)
            found = self.feasible(removed, banned, budget - 1)
            removed.discard(v)
            if found is not None:
                return found
            banned.add(v)
        return None


def _greedy_cut(adj: list[list[int]], limit: int) -> list[int]:
    removed: set[int] = set()
    while True:
        comps = _residual_components(adj, removed)
        big = max(comps, key=len, default=[])
        if len(big) <= limit:
            return sorted(removed)
        inside = set(big)
        v = max(big, key=lambda u: (sum(1 for w in adj[u] if w in inside), -u))
        removed.add(v)


def exact_cut_ids(
    adj: list[list[int]],
    epsilon: float,
    *,
    incumbent: Sequence[int] | None = None,
    node_limit: int = DEFAULT_NODE_LIMIT,
    time_limit: float | None = None,
) -> tuple[list[int], bool, int, int]:
    """Minimum cutset on adjacency lists.

    Returns ``(cutset, proved_optimal, lower_bound, nodes)``.  When the node or
    time budget runs out the best valid cutset seen so far is returned and
    ``lower_bound`` is the smallest size not yet ruled out.
    """
    n = len(adj)
    limit = size_limit(epsilon, n)
    best = _greedy_cut(adj, limit)
    if incumbent is not None and len(incumbent) < len(best):
        best = sorted(incumbent)
    deadline = None if time_limit is None else time.monotonic() + time_limit
    search = _Search(adj, limit, node_limit, deadline)
    size = 0
    try:
        while size < len(best):
            found = search.feasible(set(), set(), size)
            if found is not None:
                # every smaller size was ruled out, so this one is optimal
                return found, True, len(found), search.nodes
            size += 1
    except _Budget:
        return best, False, size, search.nodes
    return best, True, len(best), search.nodes


def naive_cut_ids(adj: list[list[int]], epsilon: float) -> list[int]:
    """Oracle: first valid subset in (size, lexicographic) order."""
    n = len(adj)
    limit = size_limit(epsilon, n)
    for s in range(n + 1):
        for S in combinations(range(n), s):
            sizes = components_adj(adj, S)
            if not sizes or sizes[0] <= limit:
                return list(S)
    return list(range(n))


def cut_epsilon_exact(
    g: LevelGraph,
    epsilon: float = 0.5,
    *,
    node_limit: int = DEFAULT_NODE_LIMIT,
    time_limit: float | None = None,
    incumbent=None,
) -> CutResult:
    """Minimum-size cutset leaving no component above ``epsilon * n``.

    ``incumbent`` may be a CutResult or a list of vertex ids used to seed the
    upper bound.  ``proved_optimal`` is False when the budget ran out.
    """
    if g.n == 0:
        return CutResult((), epsilon, 0, (), True, proved_optimal=True, lower_bound=0)
    seed = None
    if isinstance(incumbent, CutResult):
        seed = [g.index_of(p) for p in incumbent.cutset]
    elif incumbent is not None:
        seed = list(incumbent)
    ids, proved, lower, nodes = exact_cut_ids(
        g.adjacency_lists(), epsilon, incumbent=seed, node_limit=node_limit, time_limit=time_limit
    )
    return CutResult.evaluate(
        g, ids, epsilon, proved_optimal=proved, lower_bound=lower, meta={"nodes": nodes}
    )

"""Brute-force exact CVRP for tiny instances.

Every partition of the demand units into groups of at most Q is enumerated;
each group costs its optimal depot-rooted tour (Held-Karp on the metric
closure). Demands are divisible: a client of demand k contributes k units at
the same vertex, which may ride on different tours.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .errors import BudgetExceeded
from .graph import Instance, Metric, shortest_paths
from .solution import Solution, walk_through


@dataclass(frozen=True)
class OracleBudget:
    max_clients: int = 10
    max_capacity: int | None = None
    time_limit: float | None = 120.0

    def admits(self, inst: Instance) -> bool:
        if inst.total_demand > self.max_clients:
            return False
        return self.max_capacity is None or inst.capacity <= self.max_capacity


def held_karp(dist, start: int, points) -> tuple[list[int], object]:
    """Cheapest closed tour from ``start`` through all ``points``; returns (order, cost)."""
    pts = list(points)
    m = len(pts)
    if m == 0:
        return [], 0
    full = (1 << m) - 1
    best: dict[tuple[int, int], tuple] = {}
    for j, p in enumerate(pts):
        best[(1 << j, j)] = (dist[start][p], (j,))
    for mask in range(1, full + 1):
        for j in range(m):
            if not mask >> j & 1 or (mask, j) not in best:
                continue
            cost, order = best[(mask, j)]
            for k in range(m):
                if mask >> k & 1:
                    continue
                cand = (cost + dist[pts[j]][pts[k]], order + (k,))
                key = (mask | 1 << k, k)
                if key not in best or cand < best[key]:
                    best[key] = cand
    tour = min((best[(full, j)][0] + dist[pts[j]][start], best[(full, j)][1]) for j in range(m))
    return [pts[j] for j in tour[1]], tour[0]


def solve_group_tsp(metric: Metric, depot: int, group) -> tuple[list[int], object]:
    """Optimal closed tour through the depot and the distinct vertices of ``group``.

    Returns ``(stops, cost)`` with ``stops`` the visiting order (depot excluded).
    """
    pts = sorted(set(group) - {depot})
    dist = {u: {v: metric.d(u, v) for v in pts + [depot]} for u in pts + [depot]}
    return held_karp(dist, depot, pts)


def _groupings(units: int, cap: int):
    """Restricted-growth strings assigning units to groups of size at most ``cap``."""
    labels = [0] * units
    sizes: list[int] = []

    def rec(i):
        if i == units:
            yield labels
            return
        for g in range(len(sizes)):
            if sizes[g] < cap:
                labels[i] = g
                sizes[g] += 1
                yield from rec(i + 1)
                sizes[g] -= 1
        labels[i] = len(sizes)
        sizes.append(1)
        yield from rec(i + 1)
        sizes.pop()

    yield from rec(0)


def solve_oracle(inst: Instance, metric: Metric | None = None,
                 budget: OracleBudget | None = None) -> Solution:
    budget = budget or OracleBudget()
    if not budget.admits(inst):
        raise BudgetExceeded(f"oracle budget: {inst.total_demand} demand units, capacity {inst.capacity}")
    if metric is None:
        metric = shortest_paths(inst, {inst.depot, *inst.client_vertices})
    r, cap = inst.depot, inst.capacity
    units = sorted(itertools.chain.from_iterable([v] * d for v, d in inst.clients))
    memo: dict[tuple, tuple] = {}

    def group_cost(group):
        key = tuple(sorted(set(group)))
        if key not in memo:
            memo[key] = solve_group_tsp(metric, r, key)
        return memo[key]

    deadline = None if budget.time_limit is None else time.monotonic() + budget.time_limit
    best = None
    for count, labels in enumerate(_groupings(len(units), cap)):
        if deadline is not None and count % 4096 == 0 and time.monotonic() > deadline:
            raise BudgetExceeded("oracle time limit reached")
        groups: dict[int, list[int]] = {}
        for u, g in zip(units, labels):
            groups.setdefault(g, []).append(u)
        total = sum(group_cost(g)[1] for g in groups.values())
        if best is None or total < best[0]:
            best = (total, [list(g) for g in groups.values()])
    tours, served = [], []
    for g in best[1] if best else []:
        stops, _ = group_cost(g)
        tours.append(walk_through(metric, r, stops))
        # each stop serves all of this group's units located there
        served.append(tuple(u for s in [r, *stops] for u in g if u == s))
    sol = Solution.build(tours, served, inst)
    assert sol.cost == (best[0] if best else 0)
    return sol

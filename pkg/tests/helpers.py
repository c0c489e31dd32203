"""Instance builders and independent reference computations for the tests.

Nothing here calls the package's solvers or shortest-path code: these are
the slow, obvious versions the package is checked against.
"""
from __future__ import annotations

import itertools
import math
import random

from cvrp_ptas.graph import Instance


def path_rab(q=2, lengths=(1, 1)):
    """Depot 0, then a=1, b=2 along a path; both a and b are clients."""
    return Instance(3, ((0, 1, lengths[0]), (1, 2, lengths[1])), 0, ((1, 1), (2, 1)), q)


def star(leaves, length=1, q=2):
    edges = tuple((0, i, length) for i in range(1, leaves + 1))
    return Instance(leaves + 1, edges, 0, tuple((i, 1) for i in range(1, leaves + 1)), q)


def random_instance(rng: random.Random, n_max=10, clients_max=8, q_choices=(1, 2, 3), w_max=20,
                    w_min=1, n_min=2, demand_max=1):
    """Connected graph: a random spanning tree plus a few extra edges."""
    n = rng.randint(n_min, n_max)
    edges = {}
    for v in range(1, n):
        edges[(rng.randrange(v), v)] = rng.randint(w_min, w_max)
    for _ in range(rng.randint(0, n)):
        u, v = sorted(rng.sample(range(n), 2))
        edges[(u, v)] = rng.randint(w_min, w_max)
    depot = rng.randrange(n)
    k = rng.randint(0, min(n, clients_max))
    clients = sorted(rng.sample(range(n), k))
    demands = tuple((c, rng.randint(1, demand_max)) for c in clients)
    return Instance(n, tuple((u, v, w) for (u, v), w in sorted(edges.items())), depot, demands,
                    rng.choice(q_choices))


def floyd_warshall(inst: Instance):
    n = inst.n
    d = [[math.inf] * n for _ in range(n)]
    for v in range(n):
        d[v][v] = 0
    for u, v, w in inst.edges:
        if w < d[u][v]:
            d[u][v] = d[v][u] = w
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def brute_force_cvrp(inst: Instance) -> int:
    """Minimum cost over every client ordering cut into runs of at most Q (unit demands).

    Every solution serves its clients as some ordered runs, so concatenating
    the runs gives a permutation; trying all permutations and all cut sets
    covers every solution.
    """
    d = floyd_warshall(inst)
    r, cap = inst.depot, inst.capacity
    clients = [v for v, dem in inst.clients for _ in range(dem)]
    m = len(clients)
    if m == 0:
        return 0
    best = math.inf
    for perm in itertools.permutations(clients):
        # cheapest way to cut this order, by a small DP over prefixes
        f = [0] + [math.inf] * m
        for j in range(1, m + 1):
            for i in range(max(0, j - cap), j):
                run = perm[i:j]
                c = d[r][run[0]] + sum(d[a][b] for a, b in zip(run, run[1:])) + d[run[-1]][r]
                f[j] = min(f[j], f[i] + c)
        best = min(best, f[m])
    return best


def brute_tsp(dist, start, points):
    pts = list(points)
    if not pts:
        return 0
    return min(dist[start][p[0]] + sum(dist[a][b] for a, b in zip(p, p[1:])) + dist[p[-1]][start]
               for p in itertools.permutations(pts))


def band_by_boundaries(d, eps, x):
    """Band of depot distance d by direct comparison with ``base**(i+x)``."""
    if d == 0:
        return 0
    base = (1 / eps) ** (1 / eps)
    i = 0
    while d >= base ** (i + x):
        i += 1
    return i


def exact_separation_probability(du, dv, eps):
    """Measure of shifts x in [0, 1] putting distances du <= dv in different bands.

    With t = log_base(d), the band changes between du and dv exactly when
    some integer k has t(du) < k + x <= t(dv); sum those x-intervals.
    """
    if du == 0 or dv == 0:
        raise ValueError("distances must be positive")
    lb = math.log(1 / eps) / eps
    tu, tv = math.log(du) / lb, math.log(dv) / lb
    total = 0.0
    for k in range(math.floor(tu) - 1, math.floor(tv) + 2):
        lo, hi = max(0.0, tu - k), min(1.0, tv - k)
        total += max(0.0, hi - lo)
    return total


def treewidth_brute(vertices, edges):
    """Exact treewidth: the best elimination ordering over all permutations."""
    vs = sorted(set(vertices))
    if not vs:
        return -1
    best = len(vs) - 1
    for order in itertools.permutations(vs):
        adj = {v: set() for v in vs}
        for u, v in edges:
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        width = 0
        for v in order:
            nb = adj.pop(v)
            width = max(width, len(nb))
            for a in nb:
                adj[a].discard(v)
                adj[a] |= nb - {a}
            if width >= best:
                break
        best = min(best, width)
    return best


def sweep_partitions(inst: Instance, dist_from_depot, eps, points=10_000):
    """Distinct band assignments over a uniform grid of shifts."""
    seen = set()
    for j in range(points + 1):
        x = j / points
        seen.add(tuple(band_by_boundaries(dist_from_depot[v], eps, x) for v in range(inst.n)))
    return seen

"""Annulus bands around the depot with a random shift.

With ``base = (1/eps)**(1/eps)`` a vertex at depot distance ``d`` lies in band
0 when ``d < base**x`` and in band ``i >= 1`` when
``base**(i+x-1) <= d < base**(i+x)``. Band indices are computed from
``t = log_base(d)``; see :func:`band_index`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .graph import Instance, Metric, dijkstra

TIE_MARGIN = 1e-12
EPS_CLAMP = 0.99


@dataclass(frozen=True)
class BandParams:
    epsilon: float
    x: float

    def __post_init__(self):
        eps = float(self.epsilon)
        if not eps > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if eps >= 1:
            eps = EPS_CLAMP
        object.__setattr__(self, "epsilon", eps)
        if not 0.0 <= self.x <= 1.0:
            raise ValueError(f"shift must lie in [0, 1], got {self.x}")

    @property
    def base(self) -> float:
        return (1.0 / self.epsilon) ** (1.0 / self.epsilon)

    def boundary(self, i) -> float:
        """Upper (exclusive) depot-distance boundary of band ``i``."""
        return self.base ** (i + self.x)


def log_base(d, epsilon: float):
    """``eps * ln(d) / ln(1/eps)``, i.e. the logarithm of ``d`` to the band base."""
    return epsilon * np.log(d) / math.log(1.0 / epsilon)


def band_from_t(t, x):
    """Band index from ``t = log_base(d)``; works on scalars and numpy arrays.

    Values of ``t - x`` within TIE_MARGIN of an integer are snapped onto it so
    that a distance sitting on a boundary goes to the band above (lower bounds
    are inclusive).
    """
    s = np.asarray(t, dtype=float) - x
    k = np.floor(s)
    near = np.round(s)
    k = np.where(np.abs(s - near) <= TIE_MARGIN, near, k)
    out = np.where(k < 0, 0, k + 1).astype(int)
    return int(out) if out.ndim == 0 else out


def band_index(d, params: BandParams) -> int:
    if d == 0:
        return 0
    return band_from_t(log_base(float(d), params.epsilon), params.x)


@dataclass(frozen=True)
class BandPartition:
    params: BandParams
    band_of: tuple

    @property
    def band_count(self) -> int:
        return max(self.band_of, default=-1) + 1

    @cached_property
    def bands(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.band_count)]
        for v, i in enumerate(self.band_of):
            out[i].append(v)
        return out

    @property
    def fingerprint(self) -> tuple:
        return self.band_of


def make_partition(inst: Instance, metric: Metric, params: BandParams) -> BandPartition:
    r = inst.depot
    return BandPartition(params, tuple(band_index(metric.d(r, v), params) for v in range(inst.n)))


@dataclass(frozen=True)
class BandSubgraph:
    """A band's vertices together with the shortest paths certifying their distances.

    ``core`` is the band itself; ``borrowed`` are path vertices from other bands.
    """

    index: int
    vertices: tuple
    edges: tuple
    core: frozenset
    borrowed: frozenset
    diameter_bound: float

    @cached_property
    def adjacency(self) -> dict[int, list]:
        adj: dict[int, list] = {v: [] for v in self.vertices}
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    def distances_from(self, source: int) -> dict[int, object]:
        return dijkstra(self.adjacency, source)[0]

    def diameter(self):
        return max((max(self.distances_from(v).values()) for v in self.vertices), default=0)


def extract_band_subgraph(inst: Instance, metric: Metric, partition: BandPartition, i: int) -> BandSubgraph:
    """Band ``i`` plus every canonical path between its vertices and to the depot."""
    if i >= partition.band_count or not partition.bands[i]:
        raise ValueError(f"band {i} is empty")
    core = partition.bands[i]
    r = inst.depot
    length = inst.edge_length
    keep: set[tuple[int, int]] = set()
    core_set = set(core)
    for u in core:
        for v, _ in inst.adjacency[u]:
            if v in core_set and u < v:
                keep.add((u, v))

    def add_path(p):
        for a, b in zip(p, p[1:]):
            keep.add((a, b) if a < b else (b, a))

    for idx, u in enumerate(core):
        add_path(metric.path(u, r))
        for v in core[idx + 1:]:
            add_path(metric.path(u, v))
    verts = set(core)
    for a, b in keep:
        verts.update((a, b))
    edges = tuple(sorted((a, b, length[(a, b)]) for a, b in keep))
    params = partition.params
    return BandSubgraph(
        index=i,
        vertices=tuple(sorted(verts)),
        edges=edges,
        core=frozenset(core),
        borrowed=frozenset(verts - core_set),
        diameter_bound=4 * params.boundary(i),
    )


def _frac_t(d, epsilon: float) -> float:
    t = float(log_base(float(d), epsilon))
    f = t - math.floor(t)
    if f <= TIE_MARGIN or 1.0 - f <= TIE_MARGIN:
        return 0.0
    return f


def critical_shifts(inst: Instance, metric: Metric, epsilon: float) -> list[float]:
    """Shift values at which some vertex changes band, plus the midpoints between them.

    Between consecutive critical values the partition is constant, so
    evaluating these candidates reaches every partition any shift in [0, 1]
    can produce.
    """
    eps = BandParams(epsilon, 0.0).epsilon
    r = inst.depot
    crit = sorted({_frac_t(metric.d(r, v), eps) for v in range(inst.n) if metric.d(r, v) > 0})
    points = sorted({0.0, *crit, 1.0})
    mids = [(a + b) / 2 for a, b in zip(points, points[1:])]
    return sorted(set(crit) | set(mids) | {0.0})


def distinct_partitions(inst: Instance, metric: Metric, epsilon: float) -> list[tuple[float, BandPartition]]:
    """One ``(x, partition)`` per distinct partition, keeping the smallest x for each."""
    seen: dict[tuple, tuple[float, BandPartition]] = {}
    for x in critical_shifts(inst, metric, epsilon):
        p = make_partition(inst, metric, BandParams(epsilon, x))
        if p.fingerprint not in seen:
            seen[p.fingerprint] = (x, p)
    return sorted(seen.values(), key=lambda item: item[0])


def separation_probability_bound_check(u: int, v: int, metric: Metric, depot: int, epsilon: float,
                                       samples: int = 100_000, seed: int = 0) -> float:
    """Monte Carlo frequency, over uniform shifts, of ``u`` and ``v`` landing in different bands.

    Requires ``eps * d(v, r) < d(u, r) <= d(v, r)``.
    """
    eps = BandParams(epsilon, 0.0).epsilon
    du, dv = metric.d(depot, u), metric.d(depot, v)
    if not (eps * dv < du <= dv):
        raise ValueError(f"need eps*d(v,r) < d(u,r) <= d(v,r); got d(u,r)={du}, d(v,r)={dv}")
    xs = np.random.default_rng(seed).random(samples)
    bu = band_from_t(log_base(float(du), eps), xs)
    bv = band_from_t(log_base(float(dv), eps), xs)
    return float(np.mean(bu != bv))


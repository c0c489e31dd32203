"""Per-band embedders and assembly of the global host graph.

An embedder is any callable ``embed(sub, eps_prime, root) -> BandHost`` that
maps the core vertices of a band subgraph into a host graph whose distances
never shrink and grow by at most ``eps_prime`` times the band diameter. The
bands' hosts are then joined through a fresh depot ``r'`` by star edges
carrying exact depot distances.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

from .banding import BandPartition, BandSubgraph, extract_band_subgraph
from .errors import ContractViolation
from .graph import Instance, Metric, dijkstra
from .solution import Solution, check_solution, walk_through

HOST_DEPOT = 0
EXHAUSTIVE_CHECK_LIMIT = 200


@dataclass(frozen=True)
class BandHost:
    """Host graph for one band, on local vertex ids ``0..n-1``."""

    n: int
    edges: tuple
    phi: dict
    treewidth: int

    @cached_property
    def adjacency(self) -> dict[int, list]:
        adj: dict[int, list] = {v: [] for v in range(self.n)}
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    def distances_from(self, source: int) -> dict[int, object]:
        return dijkstra(self.adjacency, source)[0]


Embedder = Callable[[BandSubgraph, float, int], BandHost]


def _core(sub: BandSubgraph, root: int) -> list[int]:
    return sorted(sub.core - {root})


def exact_metric_embedder(sub: BandSubgraph, eps_prime: float, root: int) -> BandHost:
    """Complete graph on the band with exact band-subgraph distances (zero error)."""
    core = _core(sub, root)
    phi = {v: i for i, v in enumerate(core)}
    edges = []
    for i, u in enumerate(core):
        dist = sub.distances_from(u)
        for j in range(i + 1, len(core)):
            edges.append((i, j, dist[core[j]]))
    return BandHost(len(core), tuple(edges), phi, max(len(core) - 1, 0))


def star_embedder(sub: BandSubgraph, eps_prime: float, root: int) -> BandHost:
    """Star around the band vertex nearest the root; treewidth 1, error up to twice the diameter."""
    core = _core(sub, root)
    if not core:
        return BandHost(0, (), {}, 0)
    to_root = sub.distances_from(root)
    center = min(core, key=lambda v: (to_root[v], v))
    phi = {center: 0}
    for v in core:
        if v != center:
            phi[v] = len(phi)
    dist = sub.distances_from(center)
    edges = tuple((0, phi[v], dist[v]) for v in core if v != center)
    return BandHost(len(core), edges, phi, 1 if len(core) > 1 else 0)


EMBEDDERS: dict[str, Embedder] = {"exact": exact_metric_embedder, "star": star_embedder}


@dataclass
class ContractReport:
    pairs_checked: int
    contractions: list
    additive_excess: list

    @property
    def ok(self) -> bool:
        return not self.contractions and not self.additive_excess


def check_embedding(sub: BandSubgraph, host: BandHost, eps_prime: float, root: int,
                    seed: int = 0, sample_pairs: int = 5000) -> ContractReport:
    """Pairwise check of non-contraction and the additive ``eps_prime * D`` bound.

    Exhaustive for bands of at most EXHAUSTIVE_CHECK_LIMIT vertices, sampled above that.
    """
    core = _core(sub, root)
    if len(core) <= EXHAUSTIVE_CHECK_LIMIT:
        pairs = [(u, v) for i, u in enumerate(core) for v in core[i + 1:]]
    else:
        rng = random.Random(seed)
        pairs = [tuple(rng.sample(core, 2)) for _ in range(sample_pairs)]
    budget = eps_prime * sub.diameter() if pairs else 0
    guest_d: dict[int, dict] = {}
    host_d: dict[int, dict] = {}
    contractions, excess = [], []
    for u, v in pairs:
        if u not in guest_d:
            guest_d[u] = sub.distances_from(u)
            host_d[u] = host.distances_from(host.phi[u])
        dg = guest_d[u][v]
        dh = host_d[u].get(host.phi[v])
        if dh is None or dh < dg:
            contractions.append((u, v, dg, dh))
        elif dh > dg + budget:
            excess.append((u, v, dg, dh))
    return ContractReport(len(pairs), contractions, excess)


@dataclass(frozen=True)
class HostGraph:
    """Assembled host graph ``H`` with guest-to-host map and band provenance.

    ``instance`` is the CVRP instance induced on ``H`` (depot ``r'``, clients
    mapped through ``phi``). ``provenance[h]`` is the band of host vertex
    ``h`` (-1 for ``r'``).
    """

    instance: Instance
    phi: tuple
    provenance: tuple
    band_treewidths: dict
    eps_prime: float
    partition: BandPartition

    @property
    def treewidth_report(self) -> int:
        # adding r' to the disjoint band hosts raises treewidth by at most one
        return max(self.band_treewidths.values(), default=-1) + 1

    @cached_property
    def inverse_phi(self) -> dict[int, int]:
        inv = {}
        for g, h in enumerate(self.phi):
            if h is not None and h not in inv:
                inv[h] = g
        return inv


def per_band_error(epsilon: float) -> float:
    return epsilon ** (1.0 / epsilon + 1.0)


def assemble_host(inst: Instance, metric: Metric, partition: BandPartition,
                  embedder: Embedder = exact_metric_embedder, check: bool = True) -> HostGraph:
    """Embed each band and join the band hosts through a fresh depot.

    Raises ContractViolation if an embedder shrinks a distance inside its band.
    """
    eps = partition.params.epsilon
    eps_prime = per_band_error(eps)
    r = inst.depot
    phi: list[int | None] = [None] * inst.n
    phi[r] = HOST_DEPOT
    provenance = [-1]
    edges = []
    widths = {}
    for i, band in enumerate(partition.bands):
        if not [v for v in band if v != r]:
            continue
        sub = extract_band_subgraph(inst, metric, partition, i)
        host = embedder(sub, eps_prime, r)
        if check:
            report = check_embedding(sub, host, eps_prime, r)
            if report.contractions:
                u, v, dg, dh = report.contractions[0]
                raise ContractViolation(f"band {i}: d_H({u},{v})={dh} < d_G={dg}")
        offset = len(provenance)
        provenance.extend([i] * host.n)
        edges.extend((a + offset, b + offset, w) for a, b, w in host.edges)
        for v, local in host.phi.items():
            phi[v] = local + offset
            edges.append((phi[v], HOST_DEPOT, metric.d(r, v)))
        widths[i] = host.treewidth
    clients = tuple((phi[v], dem) for v, dem in inst.clients)
    host_inst = Instance(len(provenance), tuple(edges), HOST_DEPOT, clients, inst.capacity,
                         name=f"host:{inst.name}" if inst.name else "host")
    return HostGraph(host_inst, tuple(phi), tuple(provenance), widths, eps_prime, partition)


def lift_solution(host_solution: Solution, host: HostGraph, inst: Instance, metric: Metric) -> Solution:
    """Map a host solution back to the guest graph.

    Each guest tour serves the same clients in the same order, joined by
    canonical shortest paths in the guest graph.
    """
    check_solution(host_solution, host.instance)
    inv = host.inverse_phi
    tours, served = [], []
    for tour_served in host_solution.served:
        if not tour_served:
            continue
        stops = [inv[h] for h in tour_served]
        tours.append(tuple(walk_through(metric, inst.depot, stops)))
        served.append(tuple(stops))
    return Solution.build(tours, served, inst)

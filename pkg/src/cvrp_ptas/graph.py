"""Rooted weighted graphs, exact shortest paths and instance handling.

Vertices are integers ``0..n-1``. Edge lengths are exact numbers: ``int`` after
loading, ``Fraction`` only transiently while a rational document is being
scaled to integers.
"""
from __future__ import annotations

import heapq
import json
import math
from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ParseError, ValidationError

Edge = tuple  # (u, v, length)


@dataclass(frozen=True)
class Instance:
    """A capacitated vehicle routing instance on an undirected graph.

    ``clients`` holds ``(vertex, demand)`` pairs. ``scale`` records the factor
    by which the original document's lengths were multiplied; divide costs by
    it to get back to document units.
    """

    n: int
    edges: tuple
    depot: int
    clients: tuple
    capacity: int
    name: str | None = None
    scale: int = 1

    @cached_property
    def adjacency(self) -> list[list[tuple[int, object]]]:
        # parallel edges collapse to the shortest one
        best: dict[tuple[int, int], object] = {}
        for u, v, w in self.edges:
            if u == v:
                continue
            key = (u, v) if u < v else (v, u)
            if key not in best or w < best[key]:
                best[key] = w
        adj: list[list[tuple[int, object]]] = [[] for _ in range(self.n)]
        for (u, v), w in sorted(best.items()):
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    @cached_property
    def edge_length(self) -> dict[tuple[int, int], object]:
        out = {}
        for u, nbrs in enumerate(self.adjacency):
            for v, w in nbrs:
                out[(u, v)] = w
        return out

    @property
    def client_vertices(self) -> list[int]:
        return [v for v, _ in self.clients]

    @property
    def total_demand(self) -> int:
        return sum(d for _, d in self.clients)

    @property
    def unit_demand(self) -> bool:
        return all(d == 1 for _, d in self.clients)


class Metric:
    """Exact shortest-path distances from a set of sources.

    ``dist[s][v]`` is the distance from source ``s``; ``pred[s][v]`` is the
    predecessor of ``v`` on the canonical ``s``-to-``v`` path.
    """

    def __init__(self, n: int, dist: dict[int, list], pred: dict[int, list]):
        self.n = n
        self.dist = dist
        self.pred = pred

    @property
    def sources(self):
        return self.dist.keys()

    def d(self, u: int, v: int):
        if u in self.dist:
            return self.dist[u][v]
        if v in self.dist:
            return self.dist[v][u]
        raise KeyError(f"neither {u} nor {v} is a source of this metric")

    def path(self, u: int, v: int) -> list[int]:
        """Canonical shortest path from ``u`` to ``v`` (both endpoints included)."""
        if u not in self.pred:
            if v not in self.pred:
                raise KeyError(f"neither {u} nor {v} is a source of this metric")
            return self.path(v, u)[::-1]
        pred = self.pred[u]
        out = [v]
        while out[-1] != u:
            p = pred[out[-1]]
            if p is None:
                raise ValueError(f"{v} is unreachable from {u}")
            out.append(p)
        return out[::-1]

    def matrix(self) -> list[list]:
        """Full distance matrix; requires every vertex to be a source."""
        return [self.dist[u] for u in range(self.n)]


def dijkstra(adj: Mapping[int, list] | list, source: int):
    """Single-source shortest paths with the smallest-id predecessor tie-break.

    A vertex's predecessor is the smallest-id neighbour that was settled before
    it and lies on a shortest path; restricting to settled vertices keeps the
    predecessor graph acyclic when zero-length edges are present.
    Returns ``(dist, pred)`` dicts over the reachable vertices.
    """
    dist = {source: 0}
    pred = {source: None}
    settled = set()
    heap = [(0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if u in settled or du != dist[u]:
            continue
        if u != source:
            pred[u] = min(p for p, w in adj[u] if p in settled and dist[p] + w == du)
        settled.add(u)
        for v, w in adj[u]:
            nd = du + w
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist, pred


def shortest_paths(inst: Instance, sources: Iterable[int] | None = None) -> Metric:
    """Exact distances from each source (all vertices when ``sources`` is None)."""
    if sources is None:
        sources = range(inst.n)
    adj = inst.adjacency
    dist, pred = {}, {}
    for s in sources:
        ds, ps = dijkstra(adj, s)
        dist[s] = [ds.get(v, math.inf) for v in range(inst.n)]
        pred[s] = [ps.get(v) for v in range(inst.n)]
    return Metric(inst.n, dist, pred)


def is_connected(n: int, edges: Iterable[Edge]) -> bool:
    if n == 0:
        return True
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v, *_ in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == n


def validate_instance(inst: Instance) -> Instance:
    """Raise ValidationError naming the first violated invariant."""
    if inst.n < 1:
        raise ValidationError("vertices", "instance needs at least one vertex")
    if not 0 <= inst.depot < inst.n:
        raise ValidationError("depot", f"depot {inst.depot} is not a vertex")
    if not isinstance(inst.capacity, int) or inst.capacity < 1:
        raise ValidationError("capacity", f"capacity must be a positive integer, got {inst.capacity!r}")
    for u, v, w in inst.edges:
        if not (0 <= u < inst.n and 0 <= v < inst.n):
            raise ValidationError("edges", f"edge ({u}, {v}) references a missing vertex")
        if w < 0:
            raise ValidationError("nonnegative-lengths", f"edge ({u}, {v}) has length {w}")
    seen = set()
    for v, dem in inst.clients:
        if not 0 <= v < inst.n:
            raise ValidationError("clients", f"client {v} is not a vertex")
        if v in seen:
            raise ValidationError("clients", f"client {v} listed twice")
        if not isinstance(dem, int) or dem < 1:
            raise ValidationError("demands", f"client {v} has demand {dem!r}")
        seen.add(v)
    if not is_connected(inst.n, inst.edges):
        raise ValidationError("connected", "graph is not connected")
    return inst


def _parse_length(raw) -> Fraction:
    if isinstance(raw, bool):
        raise ParseError(f"bad edge length {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, (float, str)):
        try:
            return Fraction(str(raw))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad edge length {raw!r}") from exc
    raise ParseError(f"bad edge length {raw!r}")


def _as_int(raw, what):
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ParseError(f"{what} must be an integer, got {raw!r}")
    return raw


def instance_from_document(doc: Mapping) -> Instance:
    """Build an unscaled instance (lengths as Fractions) from a parsed document."""
    if not isinstance(doc, Mapping):
        raise ParseError("instance document must be a mapping")
    try:
        n = _as_int(doc["vertices"], "vertices")
        raw_edges = doc["edges"]
        depot = _as_int(doc["depot"], "depot")
        raw_clients = doc["clients"]
        capacity = _as_int(doc["capacity"], "capacity")
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from exc
    edges = []
    for e in raw_edges:
        if not isinstance(e, (list, tuple)) or len(e) != 3:
            raise ParseError(f"edge must be [u, v, length], got {e!r}")
        edges.append((_as_int(e[0], "edge endpoint"), _as_int(e[1], "edge endpoint"), _parse_length(e[2])))
    clients = []
    for c in raw_clients:
        if isinstance(c, (list, tuple)) and len(c) == 2:
            clients.append((_as_int(c[0], "client"), _as_int(c[1], "demand")))
        else:
            raise ParseError(f"client must be [vertex, demand], got {c!r}")
    return Instance(n, tuple(edges), depot, tuple(clients), capacity, doc.get("name"))


def scale_to_unit_floor(inst: Instance) -> Instance:
    """Multiply lengths by the lcm of their denominators.

    Afterwards all lengths are integers, so every nonzero depot distance is at
    least one. Integer instances come back unchanged (factor 1).
    """
    factor = 1
    for _, _, w in inst.edges:
        den = Fraction(w).denominator
        factor = factor * den // math.gcd(factor, den)
    edges = tuple((u, v, int(Fraction(w) * factor)) for u, v, w in inst.edges)
    return replace(inst, edges=edges, scale=inst.scale * factor)


def load_instance(source) -> Instance:
    """Parse and validate an instance from a mapping, JSON text or file path."""
    if isinstance(source, Path):
        source = source.read_text()
    if isinstance(source, str):
        try:
            source = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    inst = instance_from_document(source)
    validate_instance(inst)
    return scale_to_unit_floor(inst)


def read_instance(path) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(exc)) from exc
    return load_instance(text)


def to_document(inst: Instance) -> dict:
    doc = {
        "vertices": inst.n,
        "edges": [[u, v, _length_out(w)] for u, v, w in inst.edges],
        "depot": inst.depot,
        "clients": [[v, d] for v, d in inst.clients],
        "capacity": inst.capacity,
    }
    if inst.name is not None:
        doc["name"] = inst.name
    return doc


def _length_out(w):
    if isinstance(w, Fraction):
        return int(w) if w.denominator == 1 else str(w)
    return w


def reduce_demands(inst: Instance) -> Instance:
    """Replace each client of demand k > 1 by k unit clients on zero-length spokes."""
    if inst.unit_demand:
        return inst
    n = inst.n
    edges = list(inst.edges)
    clients = []
    for v, dem in inst.clients:
        if dem == 1:
            clients.append((v, 1))
            continue
        for _ in range(dem):
            edges.append((v, n, 0))
            clients.append((n, 1))
            n += 1
    return replace(inst, n=n, edges=tuple(edges), clients=tuple(clients))

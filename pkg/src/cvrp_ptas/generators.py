"""Seeded instance generators. Grid and triangulation outputs are planar."""
from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

FAMILIES = ("grid", "random-planar-triangulation", "star", "path")


@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate.

    ``size`` is ``(rows, cols)`` for grids and ``(n,)`` otherwise (for stars,
    n counts the centre). Every non-depot vertex becomes a client with
    probability ``client_density``.
    """

    family: str
    size: tuple
    weight_range: tuple = (1, 1)
    client_density: float = 1.0
    capacity: int = 2
    seed: int = 0
    depot: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        size = tuple(int(s) for s in self.size)
        object.__setattr__(self, "size", size)
        want = 2 if self.family == "grid" else 1
        if len(size) != want or min(size) < 1:
            raise ValueError(f"{self.family} needs {want} positive size value(s), got {self.size}")
        lo, hi = self.weight_range
        if not 0 <= lo <= hi:
            raise ValueError(f"bad weight range {self.weight_range}")
        if not 0.0 <= self.client_density <= 1.0:
            raise ValueError(f"client density must lie in [0, 1], got {self.client_density}")
        if self.capacity < 1:
            raise ValueError(f"capacity must be positive, got {self.capacity}")
        if not 0 <= self.depot < self.vertex_count:
            raise ValueError(f"depot {self.depot} outside 0..{self.vertex_count - 1}")

    @property
    def vertex_count(self) -> int:
        return self.size[0] * self.size[1] if self.family == "grid" else self.size[0]


def _grid_pairs(rows, cols):
    out = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                out.append((v, v + 1))
            if i + 1 < rows:
                out.append((v, v + cols))
    return out


def _triangulation(n, rng: np.random.Generator, lo, hi):
    """Delaunay triangulation of n random points in the unit square; edge weight tracks length."""
    if n < 3:
        return [(i, i + 1, hi) for i in range(n - 1)]
    pts = rng.random((n, 2))
    if n == 3:
        simplices = [(0, 1, 2)]
    else:
        tri = Delaunay(pts[:4], incremental=True)
        tri.add_points(pts[4:])
        tri.close()
        simplices = tri.simplices
    pairs = set()
    for simplex in simplices:
        a, b, c = sorted(int(v) for v in simplex)
        pairs.update({(a, b), (a, c), (b, c)})
    pairs = sorted(pairs)
    lengths = [float(np.hypot(*(pts[u] - pts[v]))) for u, v in pairs]
    longest = max(lengths)
    return [(u, v, min(hi, max(lo, round(hi * length / longest)))) for (u, v), length in zip(pairs, lengths)]


def generate(spec: GeneratorSpec) -> dict:
    """Instance document for ``spec``; identical specs give identical documents."""
    rng = random.Random(spec.seed)
    lo, hi = spec.weight_range
    n = spec.vertex_count
    if spec.family == "grid":
        edges = [(u, v, rng.randint(lo, hi)) for u, v in _grid_pairs(*spec.size)]
    elif spec.family == "path":
        edges = [(i, i + 1, rng.randint(lo, hi)) for i in range(n - 1)]
    elif spec.family == "star":
        edges = [(0, i, rng.randint(lo, hi)) for i in range(1, n)]
    else:
        edges = _triangulation(n, np.random.default_rng(spec.seed), lo, hi)
    clients = [[v, 1] for v in range(n) if v != spec.depot and rng.random() < spec.client_density]
    size = "x".join(str(s) for s in spec.size)
    return {
        "name": f"{spec.family}-{size}-s{spec.seed}",
        "vertices": n,
        "edges": [[u, v, w] for u, v, w in edges],
        "depot": spec.depot,
        "clients": clients,
        "capacity": spec.capacity,
    }

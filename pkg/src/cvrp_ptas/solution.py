"""Vehicle routing solutions and their validation."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import ValidationError
from .graph import Instance, Metric


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    tour: int | None = None

    def __str__(self):
        where = f" (tour {self.tour})" if self.tour is not None else ""
        return f"{self.kind}{where}: {self.message}"


@dataclass(frozen=True)
class Solution:
    """Depot-rooted closed walks and the clients each one serves.

    ``tours[j]`` is a vertex sequence whose consecutive vertices are adjacent;
    ``served[j]`` lists the clients assigned to tour ``j`` in visiting order.
    A client of demand k appears k times across ``served``.
    """

    tours: tuple
    served: tuple
    cost: int

    @classmethod
    def build(cls, tours, served, inst: Instance) -> Solution:
        pairs = sorted(zip((tuple(t) for t in tours), (tuple(s) for s in served)))
        cost = sum(walk_length(t, inst) for t, _ in pairs)
        return cls(tuple(t for t, _ in pairs), tuple(s for _, s in pairs), cost)

    @classmethod
    def empty(cls) -> Solution:
        return cls((), (), 0)

    def to_dict(self) -> dict:
        return {"cost": self.cost, "tours": [list(t) for t in self.tours],
                "served": [list(s) for s in self.served]}

    @classmethod
    def from_dict(cls, doc) -> Solution:
        return cls(tuple(tuple(t) for t in doc["tours"]), tuple(tuple(s) for s in doc["served"]),
                   doc["cost"])


def walk_length(walk, inst: Instance):
    length = inst.edge_length
    return sum(length[(a, b)] for a, b in zip(walk, walk[1:]) if a != b)


def walk_through(metric: Metric, depot: int, stops) -> list[int]:
    """Closed walk depot -> stops... -> depot along canonical shortest paths."""
    walk = [depot]
    for v in [*stops, depot]:
        if v != walk[-1]:
            walk.extend(metric.path(walk[-1], v)[1:])
    return walk


def solution_validate(sol: Solution, inst: Instance) -> list[Violation]:
    """All violations of closure, adjacency, capacity, coverage and cost."""
    out: list[Violation] = []
    r = inst.depot
    length = inst.edge_length
    if len(sol.tours) != len(sol.served):
        out.append(Violation("shape", f"{len(sol.tours)} tours but {len(sol.served)} assignments"))
        return out
    total = 0
    for j, (walk, served) in enumerate(zip(sol.tours, sol.served)):
        if not walk or walk[0] != r or walk[-1] != r:
            out.append(Violation("closure", f"walk {list(walk)} does not start and end at depot {r}", j))
            continue
        bad = [(a, b) for a, b in zip(walk, walk[1:]) if a != b and (a, b) not in length]
        if bad:
            out.append(Violation("adjacency", f"no edge {bad[0]}", j))
            continue
        total += walk_length(walk, inst)
        if len(served) > inst.capacity:
            out.append(Violation("capacity", f"{len(served)} clients assigned, capacity {inst.capacity}", j))
        on_walk = set(walk)
        missing = [c for c in served if c not in on_walk]
        if missing:
            out.append(Violation("visit", f"assigned client {missing[0]} is not on the walk", j))
    demand = dict(inst.clients)
    got = Counter(c for s in sol.served for c in s)
    for c, k in sorted(got.items()):
        if c not in demand:
            out.append(Violation("coverage", f"vertex {c} is served but is not a client"))
        elif k != demand[c]:
            out.append(Violation("coverage", f"client {c} served {k} times, demand {demand[c]}"))
    for c in sorted(set(demand) - set(got)):
        out.append(Violation("coverage", f"client {c} is not served"))
    if not out and total != sol.cost:
        out.append(Violation("cost", f"reported {sol.cost}, recomputed {total}"))
    return out


def check_solution(sol: Solution, inst: Instance) -> Solution:
    problems = solution_validate(sol, inst)
    if problems:
        raise ValidationError(problems[0].kind, str(problems[0]))
    return sol


def collapse_satellites(sol: Solution, reduced: Instance, original: Instance) -> Solution:
    """Map a solution of ``reduce_demands(original)`` back onto ``original``.

    Satellite vertices sit on zero-length spokes, so replacing each by its
    anchor keeps every walk valid and its length unchanged.
    """
    anchor = {v: v for v in range(original.n)}
    for u, v, _ in reduced.edges:
        if v >= original.n and u < original.n:
            anchor[v] = u
    tours, served = [], []
    for walk, sv in zip(sol.tours, sol.served):
        out = []
        for v in walk:
            a = anchor[v]
            if not out or out[-1] != a:
                out.append(a)
        tours.append(out)
        served.append(tuple(anchor[c] for c in sv))
    return Solution.build(tours, served, original)

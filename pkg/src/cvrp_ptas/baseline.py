"""Iterated tour partitioning and the radial lower bound."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graph import Instance, Metric
from .oracle import held_karp
from .solution import Solution, walk_through

EXACT_TSP_LIMIT = 12


def radial_lower_bound(inst: Instance, metric: Metric) -> Fraction:
    """``(2/Q) * sum of d(v, r)`` over client units, as an exact rational.

    Every unit of demand needs a round trip to the depot, and one trip is
    shared by at most Q units.
    """
    r = inst.depot
    total = sum(dem * metric.d(r, v) for v, dem in inst.clients)
    return Fraction(2 * total) / inst.capacity


def nearest_neighbor_tour(dist, r, points) -> list[int]:
    left = set(points)
    order, cur = [], r
    while left:
        cur = min(left, key=lambda v: (dist[cur][v], v))
        left.remove(cur)
        order.append(cur)
    return order


def two_opt(dist, r, order) -> list[int]:
    """First-improvement 2-opt on the closed tour ``r, order..., r``."""
    tour = [r, *order, r]
    improved = True
    while improved:
        improved = False
        for i in range(1, len(tour) - 2):
            for j in range(i + 1, len(tour) - 1):
                a, b, c, e = tour[i - 1], tour[i], tour[j], tour[j + 1]
                if dist[a][c] + dist[b][e] < dist[a][b] + dist[c][e]:
                    tour[i:j + 1] = tour[i:j + 1][::-1]
                    improved = True
    return tour[1:-1]


def tsp_order(inst: Instance, metric: Metric, mode: str = "auto") -> list[int]:
    """Visiting order of the distinct client vertices on a depot-anchored tour."""
    if mode not in ("auto", "exact", "heuristic"):
        raise ValueError(f"unknown tsp mode {mode!r}")
    r = inst.depot
    pts = sorted(set(inst.client_vertices))
    nodes = pts + [r]
    dist = {u: {v: metric.d(u, v) for v in nodes} for u in nodes}
    if mode == "exact" or (mode == "auto" and len(pts) <= EXACT_TSP_LIMIT):
        return held_karp(dist, r, pts)[0]
    return two_opt(dist, r, nearest_neighbor_tour(dist, r, pts))


def itp_baseline(inst: Instance, metric: Metric, tsp_mode: str = "auto") -> Solution:
    """Cut a client tour into runs of at most Q and close each run at the depot.

    All Q cut offsets are tried and the cheapest is kept; with an exact tour
    this costs at most ``(2 - 1/Q)`` times the optimum.
    """
    r, cap = inst.depot, inst.capacity
    order = tsp_order(inst, metric, tsp_mode)
    units = []
    demand = dict(inst.clients)
    for v in order:
        units.extend([v] * demand[v])
    if not units:
        return Solution.empty()
    d = metric.d
    best = None
    for offset in range(min(cap, len(units))):
        cuts = [0] + list(range(offset or cap, len(units), cap)) + [len(units)]
        runs = [units[a:b] for a, b in zip(cuts, cuts[1:]) if b > a]
        cost = sum(_run_cost(d, r, run) for run in runs)
        if best is None or cost < best[0]:
            best = (cost, runs)
    runs = best[1]
    tours = [walk_through(metric, r, run) for run in runs]
    return Solution.build(tours, [tuple(run) for run in runs], inst)


def _run_cost(d, r, run):
    stops = [r, *run, r]
    return sum(d(a, b) for a, b in zip(stops, stops[1:]))


@dataclass(frozen=True)
class BoundReport:
    """Lower bound, baseline and solver costs side by side."""

    lower_bound: Fraction
    baseline_cost: object
    solver_cost: object

    @property
    def solver_ratio(self) -> float | None:
        """solver cost over the lower bound."""
        return None if self.lower_bound == 0 else float(self.solver_cost / self.lower_bound)

    @property
    def baseline_ratio(self) -> float | None:
        """baseline cost over solver cost."""
        return None if self.solver_cost == 0 else float(Fraction(self.baseline_cost) / self.solver_cost)

    def check(self) -> list[str]:
        out = []
        if self.lower_bound > self.solver_cost:
            out.append(f"lower bound {self.lower_bound} exceeds solver cost {self.solver_cost}")
        return out

    def to_dict(self) -> dict:
        return {"lower_bound": _num(self.lower_bound), "baseline_cost": _num(self.baseline_cost),
                "solver_cost": _num(self.solver_cost), "solver_ratio": self.solver_ratio,
                "baseline_ratio": self.baseline_ratio}


def _num(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    return x


def bound_report(inst: Instance, metric: Metric, solver_cost, tsp_mode: str = "auto") -> BoundReport:
    base = itp_baseline(inst, metric, tsp_mode)
    return BoundReport(radial_lower_bound(inst, metric), base.cost, solver_cost)

"""End-to-end approximation pipeline: bands, host graph, exact DP, lifting.

A run with shift ``x`` partitions the vertices into depot-distance bands
with ``eps_hat = eps / (3Q)``, embeds every band, joins the band hosts at a
fresh depot, solves the host instance exactly and maps the tours back.
The derandomized mode repeats this for every partition a shift can produce
and keeps the cheapest result.
"""
from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .banding import BandParams, BandPartition, distinct_partitions, make_partition
from .baseline import radial_lower_bound
from .dp import solve_dp
from .embedding import EMBEDDERS, HOST_DEPOT, assemble_host, lift_solution
from .errors import CapacityPlanningError, ContractViolation
from .graph import Instance, Metric, shortest_paths
from .oracle import OracleBudget, solve_oracle
from .solution import Solution, check_solution
from .treedecomp import decompose, validate


@dataclass(frozen=True)
class PtasConfig:
    """Pipeline settings. Band parameters are derived on access, never stored."""

    epsilon: float
    capacity: int
    mode: str = "randomized"
    seed: int = 0
    embedder: str = "exact"
    # abort when the effective host width times Q exceeds this
    width_q_budget: int = 40
    oracle: bool | None = None
    oracle_budget: OracleBudget = field(default_factory=OracleBudget)
    workers: int = 1

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.capacity < 1:
            raise ValueError(f"capacity must be at least 1, got {self.capacity}")
        if self.mode not in ("randomized", "derandomized"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.embedder not in EMBEDDERS:
            raise ValueError(f"unknown embedder {self.embedder!r}")

    @property
    def band_epsilon(self) -> float:
        return self.epsilon / (3 * self.capacity)

    @property
    def eps_prime(self) -> float:
        e = BandParams(self.band_epsilon, 0.0).epsilon
        return e ** (1.0 / e + 1.0)

    @classmethod
    def for_instance(cls, inst: Instance, epsilon: float, **kw) -> PtasConfig:
        return cls(epsilon=epsilon, capacity=inst.capacity, **kw)


def treewidth_formula(band_epsilon: float) -> dict:
    """Symbolic host-treewidth bound ``(1/e)^(c/e)``; the constant c is not known."""
    e = BandParams(band_epsilon, 0.0).epsilon
    return {"expression": "(1/eps_hat)^(c/eps_hat)", "c": "unspecified",
            "log_bound_over_c": (1.0 / e) * math.log(1.0 / e)}


@dataclass
class CandidateResult:
    x: float
    band_sizes: list
    host_treewidth: int
    host_cost: object
    lifted_cost: object
    solution: Solution
    timings: dict

    def summary(self) -> dict:
        return {"x": self.x, "band_sizes": self.band_sizes, "host_treewidth": self.host_treewidth,
                "host_cost": self.host_cost, "lifted_cost": self.lifted_cost}


@dataclass
class RunReport:
    mode: str
    epsilon: float
    band_epsilon: float
    eps_prime: float
    capacity: int
    seed: int | None
    x: float | None
    band_sizes: list
    host_treewidth: int
    treewidth_formula: dict
    host_cost: object
    lifted_cost: object
    lower_bound: Fraction
    oracle_cost: object = None
    candidates: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    instance_name: str | None = None

    @property
    def ratio_to_oracle(self) -> float | None:
        if self.oracle_cost is None:
            return None
        if self.oracle_cost == 0:
            return 1.0
        return float(Fraction(self.lifted_cost) / self.oracle_cost)

    @property
    def ratio_to_lower_bound(self) -> float | None:
        return None if self.lower_bound == 0 else float(Fraction(self.lifted_cost) / self.lower_bound)

    def to_dict(self, include_timings: bool = False) -> dict:
        lb = self.lower_bound
        out = {
            "instance": self.instance_name,
            "mode": self.mode,
            "epsilon": self.epsilon,
            "band_epsilon": self.band_epsilon,
            "eps_prime": self.eps_prime,
            "capacity": self.capacity,
            "seed": self.seed,
            "x": self.x,
            "band_sizes": list(self.band_sizes),
            "host_treewidth": self.host_treewidth,
            "treewidth_formula": dict(self.treewidth_formula),
            "host_cost": self.host_cost,
            "lifted_cost": self.lifted_cost,
            "lower_bound": lb.numerator if lb.denominator == 1 else float(lb),
            "oracle_cost": self.oracle_cost,
            "ratio_to_oracle": self.ratio_to_oracle,
            "ratio_to_lower_bound": self.ratio_to_lower_bound,
            "candidates": [dict(c) for c in self.candidates],
        }
        if include_timings:
            out["timings"] = dict(self.timings)
        return out


def effective_width(host, inst: Instance) -> int:
    """Host width as seen by the DP: per band, the smaller of its host width and its client count, plus one.

    Non-client vertices never carry open segments when forgotten first, so a
    wide band with few clients stays cheap.
    """
    clients = set(inst.client_vertices) - {inst.depot}
    per_band: dict[int, int] = {}
    for v in clients:
        b = host.provenance[host.phi[v]]
        per_band[b] = per_band.get(b, 0) + 1
    return max((min(w, per_band.get(b, 0)) for b, w in host.band_treewidths.items()), default=-1) + 1


def run_candidate(inst: Instance, metric: Metric, config: PtasConfig, x: float,
                  partition: BandPartition | None = None) -> CandidateResult:
    """The pipeline for one fixed shift."""
    if not inst.unit_demand:
        raise ValueError("the pipeline needs unit demands; apply reduce_demands first")
    clock = {}
    t0 = time.perf_counter()
    if partition is None:
        partition = make_partition(inst, metric, BandParams(config.band_epsilon, x))
    host = assemble_host(inst, metric, partition, EMBEDDERS[config.embedder])
    clock["embed"] = time.perf_counter() - t0
    width = host.treewidth_report
    eff = effective_width(host, inst)
    if eff * inst.capacity > config.width_q_budget:
        raise CapacityPlanningError(
            f"effective host width {eff} with Q={inst.capacity} exceeds the width*Q budget "
            f"{config.width_q_budget}")
    t1 = time.perf_counter()
    hinst = host.instance
    h_edges = [(u, v) for u, v, _ in hinst.edges]
    td = decompose(range(hinst.n), h_edges, root_vertex=HOST_DEPOT)
    problems = validate(td, range(hinst.n), h_edges)
    if problems:
        raise ContractViolation(f"host decomposition invalid: {problems[0]}")
    clock["decompose"] = time.perf_counter() - t1
    t2 = time.perf_counter()
    host_sol = solve_dp(hinst, td)
    clock["dp"] = time.perf_counter() - t2
    t3 = time.perf_counter()
    lifted = check_solution(lift_solution(host_sol, host, inst, metric), inst)
    clock["lift"] = time.perf_counter() - t3
    if lifted.cost > host_sol.cost:
        raise ContractViolation(f"lifted cost {lifted.cost} exceeds host cost {host_sol.cost}")
    sizes = [len([v for v in band if v != inst.depot]) for band in partition.bands]
    return CandidateResult(x, sizes, width, host_sol.cost, lifted.cost, lifted, clock)


def _oracle_cost(inst: Instance, metric: Metric, config: PtasConfig):
    enabled = config.oracle if config.oracle is not None else config.oracle_budget.admits(inst)
    if not enabled:
        return None
    return solve_oracle(inst, metric, config.oracle_budget).cost


def _report(inst, metric, config, chosen: CandidateResult, mode, seed, candidates, timings) -> RunReport:
    lb = radial_lower_bound(inst, metric)
    if lb > chosen.lifted_cost:
        raise ContractViolation(f"lifted cost {chosen.lifted_cost} below the lower bound {lb}")
    t0 = time.perf_counter()
    oracle = _oracle_cost(inst, metric, config)
    timings = dict(timings, oracle=time.perf_counter() - t0)
    return RunReport(
        mode=mode, epsilon=config.epsilon, band_epsilon=config.band_epsilon, eps_prime=config.eps_prime,
        capacity=inst.capacity, seed=seed, x=chosen.x, band_sizes=chosen.band_sizes,
        host_treewidth=chosen.host_treewidth, treewidth_formula=treewidth_formula(config.band_epsilon),
        host_cost=chosen.host_cost, lifted_cost=chosen.lifted_cost, lower_bound=lb, oracle_cost=oracle,
        candidates=candidates, timings=timings, instance_name=inst.name)


def run_randomized(inst: Instance, config: PtasConfig, metric: Metric | None = None):
    """One shift drawn from ``random.Random(config.seed)``; returns (solution, report)."""
    metric = metric or shortest_paths(inst)
    x = random.Random(config.seed).random()
    res = run_candidate(inst, metric, config, x)
    return res.solution, _report(inst, metric, config, res, "randomized", config.seed, [], res.timings)


def _candidate_worker(args):
    inst, config, x, partition = args
    return run_candidate(inst, shortest_paths(inst), config, x, partition)


def run_derandomized(inst: Instance, config: PtasConfig, metric: Metric | None = None):
    """Best lifted solution over all distinct band partitions; ties go to the smaller shift."""
    metric = metric or shortest_paths(inst)
    t0 = time.perf_counter()
    cands = distinct_partitions(inst, metric, config.band_epsilon)
    if len(cands) > max(inst.n, 1):
        raise ContractViolation(f"{len(cands)} candidate partitions for {inst.n} vertices")
    enum_time = time.perf_counter() - t0
    if config.workers > 1 and len(cands) > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(_candidate_worker, [(inst, config, x, p) for x, p in cands]))
    else:
        results = [run_candidate(inst, metric, config, x, p) for x, p in cands]
    best = min(results, key=lambda c: (c.lifted_cost, c.x))
    timings = {"enumerate": enum_time,
               "candidates": sum(sum(c.timings.values()) for c in results)}
    report = _report(inst, metric, config, best, "derandomized", None,
                     [c.summary() for c in results], timings)
    return best.solution, report


def run(inst: Instance, config: PtasConfig, metric: Metric | None = None):
    if config.mode == "derandomized":
        return run_derandomized(inst, config, metric)
    return run_randomized(inst, config, metric)


@dataclass(frozen=True)
class AuditResult:
    mean: float
    stderr: float
    samples: int
    oracle_cost: object
    distinct_partitions: int


def expected_cost_audit(inst: Instance, config: PtasConfig, samples: int,
                        metric: Metric | None = None) -> AuditResult:
    """Monte Carlo mean and standard error of lifted cost over oracle cost.

    Shifts come from ``random.Random(config.seed)``; each distinct partition
    is solved once.
    """
    metric = metric or shortest_paths(inst)
    oracle = solve_oracle(inst, metric, config.oracle_budget).cost
    rng = random.Random(config.seed)
    cache: dict[tuple, object] = {}
    ratios = []
    for _ in range(samples):
        x = rng.random()
        part = make_partition(inst, metric, BandParams(config.band_epsilon, x))
        if part.fingerprint not in cache:
            cache[part.fingerprint] = run_candidate(inst, metric, config, x, part).lifted_cost
        cost = cache[part.fingerprint]
        ratios.append(1.0 if oracle == 0 else float(Fraction(cost) / oracle))
    mean = sum(ratios) / len(ratios) if ratios else 1.0
    if len(ratios) > 1:
        var = sum((r - mean) ** 2 for r in ratios) / (len(ratios) - 1)
        se = math.sqrt(var / len(ratios))
    else:
        se = 0.0
    return AuditResult(mean, se, len(ratios), oracle, len(cache))

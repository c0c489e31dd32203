"""Capacitated vehicle routing via banded metric embeddings and tree-decomposition DP."""
from .banding import BandParams, BandPartition, distinct_partitions, make_partition
from .baseline import BoundReport, itp_baseline, radial_lower_bound
from .dp import solve_dp
from .embedding import HostGraph, assemble_host, lift_solution
from .errors import (BudgetExceeded, CapacityPlanningError, ContractViolation, CvrpError, ParseError,
                     ValidationError)
from .generators import GeneratorSpec, generate
from .graph import Instance, Metric, load_instance, reduce_demands, shortest_paths
from .oracle import OracleBudget, solve_oracle
from .pipeline import PtasConfig, RunReport, expected_cost_audit, run_derandomized, run_randomized
from .report import emit_report
from .solution import Solution, solution_validate
from .treedecomp import TreeDecomposition, decompose, to_nice_form, validate

__all__ = [
    "BandParams", "BandPartition", "BoundReport", "BudgetExceeded", "CapacityPlanningError",
    "ContractViolation", "CvrpError", "GeneratorSpec", "HostGraph", "Instance", "Metric",
    "OracleBudget", "ParseError", "PtasConfig", "RunReport", "Solution", "TreeDecomposition",
    "ValidationError", "assemble_host", "decompose", "distinct_partitions", "emit_report",
    "expected_cost_audit", "generate", "itp_baseline", "lift_solution", "load_instance",
    "make_partition", "radial_lower_bound", "reduce_demands", "run_derandomized", "run_randomized",
    "shortest_paths", "solution_validate", "solve_dp", "solve_oracle", "to_nice_form", "validate",
]

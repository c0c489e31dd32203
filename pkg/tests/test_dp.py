import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvrp_ptas.baseline import radial_lower_bound
from cvrp_ptas.dp import solve_dp
from cvrp_ptas.errors import CapacityPlanningError, ValidationError
from cvrp_ptas.graph import Instance, shortest_paths
from cvrp_ptas.oracle import solve_oracle
from cvrp_ptas.solution import Solution, check_solution, solution_validate
from cvrp_ptas.treedecomp import TreeDecomposition

from helpers import brute_force_cvrp, path_rab, random_instance


def test_path_q2():
    sol = solve_dp(path_rab(q=2))
    assert sol.cost == 4
    assert sol.tours == ((0, 1, 2, 1, 0),)


def test_path_q1():
    sol = solve_dp(path_rab(q=1))
    assert sol.cost == 6
    assert sorted(sol.served) == [(1,), (2,)]


def test_no_clients():
    inst = Instance(3, ((0, 1, 1), (1, 2, 1)), 0, (), 2)
    assert solve_dp(inst) == Solution.empty()


def test_client_on_depot_is_free():
    inst = Instance(2, ((0, 1, 3),), 0, ((0, 1), (1, 1)), 1)
    sol = solve_dp(inst)
    assert sol.cost == 6 and not solution_validate(sol, inst)


def test_rejects_multi_unit_demand():
    with pytest.raises(ValueError):
        solve_dp(Instance(2, ((0, 1, 1),), 0, ((1, 2),), 2))


def test_any_valid_decomposition_accepted():
    inst = path_rab()
    one_bag = TreeDecomposition([frozenset({0, 1, 2})], [], 0)
    assert solve_dp(inst, one_bag).cost == 4


def test_invalid_decomposition_rejected():
    bad = TreeDecomposition([frozenset({0, 1})], [], 0)
    with pytest.raises(ValueError):
        solve_dp(path_rab(), bad)


def test_state_cap():
    inst = Instance(7, tuple((i, j, 1 + (i + j) % 3) for i in range(7) for j in range(i + 1, 7)), 0,
                    tuple((v, 1) for v in range(1, 7)), 3)
    with pytest.raises(CapacityPlanningError):
        solve_dp(inst, max_states=5)


@given(st.integers(0, 100_000))
def test_matches_brute_force(seed):
    inst = random_instance(random.Random(seed), n_max=8, clients_max=5, w_min=0)
    sol = solve_dp(inst)
    assert not solution_validate(sol, inst)
    assert sol.cost == brute_force_cvrp(inst)


def test_monotone_in_capacity():
    rng = random.Random(4)
    for _ in range(20):
        base = random_instance(rng, n_max=8, clients_max=6)
        costs = [solve_dp(Instance(base.n, base.edges, base.depot, base.clients, q)).cost for q in (1, 2, 3, 4)]
        assert costs == sorted(costs, reverse=True)


def test_lower_bound_holds():
    rng = random.Random(6)
    for _ in range(30):
        inst = random_instance(rng, n_max=9, clients_max=6)
        assert solve_dp(inst).cost >= radial_lower_bound(inst, shortest_paths(inst))


def test_clique_host_shape():
    # depot joined to all of an 8-clique of clients: the host shape produced by one wide band
    rng = random.Random(0)
    m = 8
    edges = [(0, i, rng.randint(1, 10)) for i in range(1, m + 1)]
    edges += [(i, j, rng.randint(1, 10)) for i in range(1, m + 1) for j in range(i + 1, m + 1)]
    inst = Instance(m + 1, tuple(edges), 0, tuple((i, 1) for i in range(1, m + 1)), 2)
    assert solve_dp(inst).cost == solve_oracle(inst).cost


class TestValidator:
    inst = path_rab(q=1)

    def test_valid(self):
        sol = Solution.build([(0, 1, 0), (0, 1, 2, 1, 0)], [(1,), (2,)], self.inst)
        assert solution_validate(sol, self.inst) == []
        assert check_solution(sol, self.inst) is sol

    def test_capacity(self):
        sol = Solution.build([(0, 1, 2, 1, 0)], [(1, 2)], self.inst)
        kinds = [v.kind for v in solution_validate(sol, self.inst)]
        assert kinds == ["capacity"]
        with pytest.raises(ValidationError):
            check_solution(sol, self.inst)

    def test_coverage(self):
        sol = Solution.build([(0, 1, 0)], [(1,)], self.inst)
        problems = solution_validate(sol, self.inst)
        assert [v.kind for v in problems] == ["coverage"] and "2" in problems[0].message

    def test_closure_and_adjacency(self):
        sol = Solution(((1, 0),), ((1,),), 1)
        assert solution_validate(sol, self.inst)[0].kind == "closure"
        sol = Solution(((0, 2, 0),), ((2,),), 4)
        assert solution_validate(sol, self.inst)[0].kind == "adjacency"

    def test_cost_mismatch(self):
        sol = Solution(((0, 1, 0), (0, 1, 2, 1, 0)), ((1,), (2,)), 5)
        assert [v.kind for v in solution_validate(sol, self.inst)] == ["cost"]

    def test_unvisited_assignment(self):
        sol = Solution.build([(0, 1, 0), (0, 1, 0)], [(1,), (2,)], self.inst)
        assert "visit" in [v.kind for v in solution_validate(sol, self.inst)]

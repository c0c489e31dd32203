import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvrp_ptas import cli
from cvrp_ptas.errors import ContractViolation
from cvrp_ptas.generators import FAMILIES, GeneratorSpec, generate
from cvrp_ptas.graph import load_instance, to_document
from cvrp_ptas.oracle import solve_oracle
from cvrp_ptas.report import emit_report, flatten, parse_table

from helpers import path_rab, star


def _run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def _write(tmp_path, inst_or_doc, name="inst.json"):
    doc = inst_or_doc if isinstance(inst_or_doc, dict) else to_document(inst_or_doc)
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


# generators

def test_grid_three_by_three():
    doc = generate(GeneratorSpec("grid", (3, 3)))
    assert doc["vertices"] == 9 and len(doc["edges"]) == 12
    assert {w for _, _, w in doc["edges"]} == {1}


def test_path_three_is_rab():
    inst = load_instance(generate(GeneratorSpec("path", (3,), capacity=2)))
    ref = path_rab(q=2)
    assert (inst.n, inst.edges, inst.depot, inst.clients, inst.capacity) == \
        (ref.n, ref.edges, ref.depot, ref.clients, ref.capacity)


def test_same_seed_same_document():
    for fam, size in (("grid", (3, 4)), ("random-planar-triangulation", (12,)), ("star", (6,))):
        spec = GeneratorSpec(fam, size, (1, 9), 0.6, 3, seed=42)
        assert json.dumps(generate(spec)) == json.dumps(generate(spec))


def test_invalid_specs():
    for bad in (dict(family="torus", size=(3,)), dict(family="grid", size=(0, 3)),
                dict(family="path", size=(3,), weight_range=(5, 2)),
                dict(family="star", size=(4,), client_density=1.5),
                dict(family="path", size=(3,), capacity=0),
                dict(family="path", size=(3,), depot=3)):
        with pytest.raises(ValueError):
            GeneratorSpec(**bad)


def test_thousand_specs_round_trip():
    rng = random.Random(0)
    for _ in range(1000):
        fam = rng.choice(FAMILIES)
        size = (rng.randint(1, 5), rng.randint(1, 5)) if fam == "grid" else (rng.randint(1, 14),)
        lo = rng.randint(0, 5)
        spec = GeneratorSpec(fam, size, (lo, lo + rng.randint(0, 10)), rng.random(), rng.randint(1, 4),
                             rng.randrange(10_000), rng.randrange(GeneratorSpec(fam, size).vertex_count))
        inst = load_instance(generate(spec))
        assert inst.n == spec.vertex_count


def test_triangulation_is_planar_sized():
    for seed in range(20):
        n = 4 + seed
        doc = generate(GeneratorSpec("random-planar-triangulation", (n,), seed=seed))
        # simple planar graphs have at most 3n - 6 edges
        assert len(doc["edges"]) <= 3 * n - 6
        assert len({(u, v) for u, v, _ in doc["edges"]}) == len(doc["edges"])


# report emission

def _sample_report():
    return {"run": {"x": 0.25, "lifted_cost": 7, "bands": [3, 4], "nested": [{"a": 1.5}, {"a": None}]},
            "bounds": {"lower_bound": 3.5, "solver_ratio": 2.0}}


def test_json_is_byte_stable():
    assert emit_report(_sample_report(), "json") == emit_report(_sample_report(), "json")


@given(st.recursive(st.one_of(st.integers(-10**6, 10**6), st.floats(allow_nan=False, allow_infinity=False),
                              st.booleans(), st.none(), st.text(max_size=5)),
                    lambda kids: st.dictionaries(st.text("abcxyz_", min_size=1, max_size=4), kids, min_size=1,
                                                 max_size=3), max_leaves=10)
       .filter(lambda d: isinstance(d, dict)))
def test_table_and_json_agree(doc):
    table = parse_table(emit_report(doc, "table"))
    from_json = dict(flatten(json.loads(emit_report(doc, "json"))))
    assert table == from_json


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_report({}, "xml")


# subcommands

def test_gen_and_solve(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, _, _ = _run(capsys, "gen", "grid", "--size", 2, 3, "--capacity", 2, "--out", out)
    assert code == 0 and load_instance(out.read_text()).n == 6
    code, text, _ = _run(capsys, "--format", "json", "solve", out, "--oracle")
    assert code == 0
    doc = json.loads(text)
    assert doc["solver"] == "oracle" and doc["solution"]["cost"] == solve_oracle(load_instance(out)).cost


def test_global_flags_after_subcommand(tmp_path, capsys):
    path = _write(tmp_path, path_rab())
    before = _run(capsys, "--seed", 3, "--format", "json", "bands", path)[1]
    after = _run(capsys, "bands", path, "--seed", 3, "--format", "json")[1]
    assert before == after and json.loads(after)["x"] == random.Random(3).random()


def test_every_solver_mode(tmp_path, capsys):
    path = _write(tmp_path, star(5, length=2, q=2))
    costs = {}
    for mode in ("--oracle", "--baseline", "--exact-tw", "--ptas"):
        code, text, _ = _run(capsys, "--format", "json", "solve", path, mode)
        assert code == 0
        doc = json.loads(text)
        assert doc["lower_bound"] <= doc["solution"]["cost"]
        costs[mode] = doc["solution"]["cost"]
    # each of the five spokes of length 2 is walked out and back
    assert costs["--oracle"] == costs["--exact-tw"] == 20
    code, text, _ = _run(capsys, "--format", "json", "solve", path, "--ptas", "--derandomize")
    assert json.loads(text)["report"]["mode"] == "derandomized"


def test_multi_demand_through_cli(tmp_path, capsys):
    doc = {"vertices": 3, "edges": [[0, 1, 1], [1, 2, 2]], "depot": 0, "clients": [[1, 2], [2, 1]],
           "capacity": 2}
    path = _write(tmp_path, doc)
    ref = solve_oracle(load_instance(doc)).cost
    for mode in ("--exact-tw", "--ptas"):
        code, text, _ = _run(capsys, "--format", "json", "solve", path, mode)
        assert code == 0 and json.loads(text)["solution"]["cost"] >= ref
    assert json.loads(_run(capsys, "--format", "json", "solve", path, "--exact-tw")[1])["solution"]["cost"] == ref


def test_solve_out_then_verify(tmp_path, capsys):
    path = _write(tmp_path, path_rab(q=1))
    sol_path = tmp_path / "sol.json"
    assert _run(capsys, "solve", path, "--exact-tw", "--out", sol_path)[0] == 0
    code, text, _ = _run(capsys, "--format", "json", "verify", path, sol_path)
    assert code == 0 and json.loads(text) == {"valid": True, "cost": 6, "violations": []}
    bad = json.loads(sol_path.read_text())
    bad["cost"] += 1
    sol_path.write_text(json.dumps(bad))
    code, text, _ = _run(capsys, "--format", "json", "verify", path, sol_path)
    assert code == cli.EXIT_VALIDATION and json.loads(text)["valid"] is False


def test_bands_embed_treedecomp(tmp_path, capsys):
    path = _write(tmp_path, generate(GeneratorSpec("grid", (3, 3), capacity=2)))
    code, text, _ = _run(capsys, "--format", "json", "--epsilon", 0.3, "bands", path, "--all")
    doc = json.loads(text)
    assert code == 0 and doc["candidates"] == len(doc["partitions"]) <= 9
    code, text, _ = _run(capsys, "--format", "json", "--epsilon", 0.3, "embed", path, "--x", 0.4)
    doc = json.loads(text)
    assert code == 0 and doc["treewidth_report"] == max(doc["band_treewidths"].values()) + 1
    assert all(c["contractions"] == 0 for c in doc["checks"].values())
    load_instance(doc["host"])
    code, text, _ = _run(capsys, "--format", "json", "treedecomp", path)
    doc = json.loads(text)
    assert code == 0 and doc["valid"] and doc["width"] == 3


def test_report_json_identical_and_has_bounds(tmp_path, capsys):
    path = _write(tmp_path, generate(GeneratorSpec("random-planar-triangulation", (8,), (1, 9), 0.8, 2, seed=1)))
    a = _run(capsys, "report", path, "--json", "--seed", 5)[1]
    b = _run(capsys, "report", path, "--json", "--seed", 5)[1]
    assert a == b
    doc = json.loads(a)
    assert {"lower_bound", "solver_ratio", "baseline_ratio"} <= set(doc["bounds"])
    assert {"lower_bound", "oracle_cost", "lifted_cost", "host_cost"} <= set(doc["run"])
    table = parse_table(_run(capsys, "report", path, "--seed", 5)[1])
    assert table == dict(flatten(doc))


def test_bad_instance_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"vertices": 2, "edges": [], "depot": 0, "clients": [], "capacity": 1}')
    code, _, err = _run(capsys, "solve", path, "--oracle")
    assert code == cli.EXIT_VALIDATION and "error" in err
    path.write_text("not json")
    assert _run(capsys, "treedecomp", path)[0] == cli.EXIT_VALIDATION
    assert _run(capsys, "solve", tmp_path / "missing.json", "--oracle")[0] == cli.EXIT_VALIDATION


def test_budget_exit_code(tmp_path, capsys):
    path = _write(tmp_path, star(11, q=2))
    code, _, err = _run(capsys, "solve", path, "--oracle")
    assert code == cli.EXIT_BUDGET and "budget" in err


def test_contract_exit_code(tmp_path, capsys, monkeypatch):
    def broken(*_a, **_k):
        raise ContractViolation("lifted cost above host cost")
    monkeypatch.setattr(cli, "run_randomized", broken)
    path = _write(tmp_path, path_rab())
    assert _run(capsys, "solve", path, "--ptas")[0] == cli.EXIT_CONTRACT

import json
import re
import subprocess
import sys

import pytest

from stclab import cli
from stclab.generators import cycle_graph
from stclab.graph import SpanningTree
from stclab.io import dump_json, graph_from_json, graph_to_json, tree_from_json, tree_to_json
from stclab.reduction import ReductionMap, RoundtripVerdict, assignment_to_tree, audit_reduction
from stclab.sat import parse_dimacs

TWO_VAR = "p cnf 2 3\n1 2 0\n1 -2 0\n-1 2 0\n"
UNSAT_4 = "p cnf 4 6\n2 1 0\n-3 -1 0\n-4 3 0\n1 -2 0\n4 3 0\n2 4 0\n"


@pytest.fixture
def work(tmp_path):
    (tmp_path / "f.cnf").write_text(TWO_VAR)
    (tmp_path / "u.cnf").write_text(UNSAT_4)
    (tmp_path / "c6.json").write_text(dump_json(graph_to_json(cycle_graph(6))))
    return tmp_path


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_roundtrip_satisfiable(work, capsys):
    code, out, _ = run(capsys, "roundtrip", "--cnf", work / "f.cnf", "--k", 5, "--deterministic")
    assert code == 0
    data = json.loads(out)
    assert data["label"] == "consistent(sat,yes)"
    assert data["elapsed_ms"] == 0


def test_decide_six_cycle(work, capsys):
    code, out, _ = run(capsys, "stc-decide", "--graph", work / "c6.json", "--k", 1)
    assert code == 0
    assert json.loads(out)["decision"] == "no"
    code, out, _ = run(capsys, "stc-decide", "--graph", work / "c6.json", "--k", 2)
    data = json.loads(out)
    assert code == 0 and data["decision"] == "yes" and data["k"] == 2


def test_exact_six_cycle(work, capsys):
    code, out, _ = run(capsys, "stc-exact", "--graph", work / "c6.json", "--deterministic")
    assert code == 0
    data = json.loads(out)
    assert data["optimum"] == 2
    assert tree_from_json(data["certificate"], cycle_graph(6)).graph == cycle_graph(6)


def test_sat_solve(work, capsys):
    code, out, _ = run(capsys, "sat-solve", "--cnf", work / "f.cnf")
    assert code == 0 and json.loads(out) == {"assignment": {"x1": True, "x2": True}, "satisfiable": True}
    code, out, _ = run(capsys, "sat-solve", "--cnf", work / "u.cnf")
    assert code == 0 and json.loads(out) == {"satisfiable": False}


def test_reduce_artifacts_reparse(work, capsys):
    code, out, _ = run(capsys, "reduce", "--cnf", work / "f.cnf", "--k", 5)
    assert code == 0
    bundle = json.loads(out)
    g = graph_from_json(bundle["graph"])
    rmap = ReductionMap.from_json(bundle["map"])
    assert (g.n, g.m) == (14, 23)
    assert audit_reduction(g, rmap, parse_dimacs(TWO_VAR)) == []
    # Split form: graph on --out, map on --map.
    code, _, _ = run(capsys, "reduce", "--cnf", work / "f.cnf", "--k", 5,
                     "--out", work / "g.json", "--map", work / "m.json")
    assert code == 0
    assert graph_from_json(json.loads((work / "g.json").read_text())) == g
    assert ReductionMap.from_json(json.loads((work / "m.json").read_text())) == rmap


def test_pipeline_decide_verify_claims(work, capsys):
    run(capsys, "reduce", "--cnf", work / "f.cnf", "--k", 5, "--out", work / "b.json")
    code, _, _ = run(capsys, "stc-decide", "--graph", work / "b.json", "--k", 5, "--out", work / "r.json")
    assert code == 0
    code, out, _ = run(capsys, "verify-tree", "--graph", work / "b.json", "--tree", work / "r.json", "--k", 5)
    report = json.loads(out)
    assert code == 0 and report["within_k"] and report["max_congestion"] <= 5
    code, out, _ = run(capsys, "claims", "--graph", work / "b.json", "--tree", work / "r.json")
    assert code == 0 and json.loads(out)["all_pass"] is True


def test_claims_on_corrupted_tree(work, capsys):
    run(capsys, "reduce", "--cnf", work / "f.cnf", "--k", 5, "--out", work / "g.json", "--map", work / "m.json")
    g = graph_from_json(json.loads((work / "g.json").read_text()))
    rmap = ReductionMap.from_json(json.loads((work / "m.json").read_text()))
    tree = assignment_to_tree(g, rmap, {1: True, 2: True})
    c = rmap.clauses[0]
    other = next(e for e in c.lit_edges if e not in tree)
    drop = tree.path(g.edges[other].other(c.vertex), rmap.root)[0]
    bent = SpanningTree(g, (tree.edge_ids - {drop}) | {other})
    (work / "t.json").write_text(dump_json(tree_to_json(bent)))
    code, out, _ = run(capsys, "claims", "--graph", work / "g.json", "--map", work / "m.json",
                       "--tree", work / "t.json")
    data = json.loads(out)
    assert code == 0
    assert data["all_pass"] is False
    assert data["claims"]["3"] == {"pass": False, "witness": {"clause": 1, "degree": 2, "vertex": c.vertex}}


def test_export_dot(work, capsys):
    run(capsys, "stc-exact", "--graph", work / "c6.json", "--out", work / "r.json")
    code, out, _ = run(capsys, "export-dot", "--graph", work / "c6.json", "--tree", work / "r.json")
    assert code == 0 and out.startswith("graph ")
    edges = re.findall(r"^\s*(\d+) -- (\d+) \[.*style=(\w+)", out, flags=re.M)
    assert len(edges) == 6
    assert sorted(style for *_, style in edges) == ["dashed"] + ["solid"] * 5
    code, out, _ = run(capsys, "export-dot", "--graph", work / "c6.json", "--format", "json")
    assert graph_from_json(json.loads(out)["graph"]) == cycle_graph(6)


def test_gen_corpus(tmp_path, capsys):
    code, out, _ = run(capsys, "gen-corpus", "--seed", 5, "--count", 6, "--out", tmp_path / "a")
    assert code == 0
    manifest = json.loads(out)
    assert [e["num_vars"] for e in manifest["formulas"]] == [2, 3, 4, 2, 3, 4]
    for entry in manifest["formulas"]:
        text = (tmp_path / "a" / entry["file"]).read_text()
        assert text.startswith("c seed=5 ")
        assert parse_dimacs(text).num_variables == entry["num_vars"]
    run(capsys, "gen-corpus", "--seed", 5, "--count", 6, "--out", tmp_path / "b")
    for entry in manifest["formulas"]:
        assert (tmp_path / "a" / entry["file"]).read_bytes() == (tmp_path / "b" / entry["file"]).read_bytes()


def test_gen_corpus_unsat_filter(tmp_path, capsys):
    code, out, _ = run(capsys, "gen-corpus", "--seed", 1, "--count", 1, "--num-vars", 4,
                       "--only", "unsat", "--out", tmp_path)
    assert code == 0
    assert json.loads(out)["formulas"][0]["satisfiable"] is False
    code, _, err = run(capsys, "gen-corpus", "--seed", 1, "--count", 1, "--num-vars", 2,
                       "--only", "unsat", "--max-draws", 200, "--out", tmp_path)
    assert code == 2 and "no unsat formula" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["stc-decide", "--graph", "c6.json"],
        ["stc-exact"],
        ["reduce", "--cnf", "f.cnf", "--k", "4"],
        ["sat-solve", "--cnf", "missing.cnf"],
        ["sat-solve", "--cnf", "bad.cnf"],
        ["stc-exact", "--graph", "f.cnf"],
        ["claims", "--graph", "c6.json", "--tree", "c6.json"],
    ],
)
def test_usage_errors(work, capsys, monkeypatch, argv):
    monkeypatch.chdir(work)
    (work / "bad.cnf").write_text("p cnf 1 1\n1 -1 0\n")
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == "" and err.startswith("stclab ")


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["no-such-command"])
    assert info.value.code == 2


def test_timeout_exit_three(work, capsys):
    run(capsys, "reduce", "--cnf", work / "u.cnf", "--k", 5, "--out", work / "b.json")
    code, out, _ = run(capsys, "stc-decide", "--graph", work / "b.json", "--k", 5, "--timeout-ms", 30)
    assert code == 3 and json.loads(out)["decision"] == "timeout"
    code, out, _ = run(capsys, "roundtrip", "--cnf", work / "u.cnf", "--k", 5, "--timeout-ms", 30)
    assert code == 3 and json.loads(out)["verdict"] == "inconclusive"


def test_inconsistency_exit_one(work, capsys, monkeypatch):
    fake = RoundtripVerdict(satisfiable=True, stc_decision="no", verdict="inconsistent",
                            problems=["satisfiability and K-STC decision disagree"])
    monkeypatch.setattr(cli, "roundtrip_check", lambda *a, **k: fake)
    code, out, _ = run(capsys, "roundtrip", "--cnf", work / "f.cnf", "--k", 5)
    assert code == 1 and json.loads(out)["label"] == "inconsistent(sat,no)"


@pytest.mark.parametrize(
    "argv",
    [
        ["reduce", "--cnf", "f.cnf", "--k", "5"],
        ["stc-decide", "--graph", "c6.json", "--k", "2", "--deterministic"],
        ["stc-exact", "--graph", "c6.json", "--deterministic"],
        ["roundtrip", "--cnf", "f.cnf", "--k", "6", "--deterministic"],
        ["export-dot", "--graph", "c6.json"],
    ],
)
def test_deterministic_outputs_are_byte_identical(work, argv):
    outputs = [
        subprocess.run([sys.executable, "-m", "stclab", *argv], cwd=work, capture_output=True, check=True).stdout
        for _ in range(2)
    ]
    assert outputs[0] == outputs[1]
    assert outputs[0].endswith(b"\n")
    if argv[0] != "export-dot":
        text = outputs[0].decode()
        assert text == dump_json(json.loads(text))

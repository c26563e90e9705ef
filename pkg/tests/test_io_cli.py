import json
from pathlib import Path

import pytest

from conftest import E, T, U, A, two_branch
from spanalt import io
from spanalt.acq import ConjunctiveQuery, Database, JoinTree
from spanalt.cli import main
from spanalt.errors import FormatError
from spanalt.grammar import parse_grammar
from spanalt.machine import Machine
from spanalt.wfwalks import LabeledGraph, OCRelation

DATA = Path(__file__).resolve().parent.parent / "data"

SAMPLES = {
    "machine": Machine.build({"q0": U, "q1": A, "q2": E, "q3": A},
                             [T("q0", "q1", "a", move="R"), T("q0", "q2"), T("q2", "q3", "b", write="x")],
                             "q0", auxiliary={"q2"}),
    "grammar": parse_grammar("S -> a S b | ε"),
    "graph": LabeledGraph(("s", "t"), (("s", "t", "("), ("t", "s", None))),
    "oc": OCRelation({("(", ")")}),
    "database": Database({"R": {("a", "b")}, "U": {("a",)}}),
    "query": ConjunctiveQuery(("x",), (("R", ("x", "y")), ("U", ("x",)))),
    "jointree": JoinTree(0, {1: 0}),
}


@pytest.mark.parametrize("kind", sorted(SAMPLES))
def test_round_trip(kind, tmp_path):
    obj = SAMPLES[kind]
    path = tmp_path / f"x.{kind}.json"
    io.dump(obj, path)
    back = io.load(path, kind)
    assert io.dumps(back) == io.dumps(obj)
    assert json.loads(path.read_text())["format"] == f"spanalt.{kind}/1"


@pytest.mark.parametrize("path", sorted(DATA.glob("*.json")), ids=lambda p: p.name)
def test_shipped_data_loads(path):
    io.load(path, path.name.split(".")[1])


def test_syntax_error_reports_position():
    with pytest.raises(FormatError) as info:
        io.loads('{\n  "format": "spanalt.oc/1",\n  "pairs": [,]\n}', "oc", "bad.json")
    assert (info.value.line, info.value.column) == (3, 13)
    assert str(info.value).startswith("bad.json:3:13:")


def test_schema_error_reports_path():
    with pytest.raises(FormatError, match=r"\$\.edges\[1\]"):
        io.loads('{"format": "spanalt.graph/1", "vertices": ["s"], "edges": [["s","s"], ["s"]]}', "graph")


def test_wrong_format_tag():
    with pytest.raises(FormatError, match="spanalt.grammar/1"):
        io.loads('{"format": "spanalt.oc/1", "pairs": []}', "grammar")


def test_array_transitions():
    text = json.dumps({"format": "spanalt.machine/1", "states": {"q0": "exists", "qa": "accept"},
                       "initial": "q0", "transitions": [["q0", "_", "qa", "_", "S", "a"]]})
    m = io.loads(text, "machine")
    assert m.transitions[0].output == "a"


def test_validation_errors_become_format_errors():
    text = json.dumps({"format": "spanalt.machine/1", "states": {"q0": "exists"}, "initial": "nope",
                       "transitions": []})
    with pytest.raises(FormatError):
        io.loads(text, "machine")


def test_missing_file():
    with pytest.raises(FormatError, match="cannot read"):
        io.load("/nonexistent/x.json", "oc")


# ---------------------------------------------------------------------------
# command line

def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--json")
    return code, json.loads(out.out)


def test_machine_span(capsys):
    code, report = run_json(capsys, "machine", "span", DATA / "two_branch.machine.json",
                            "--space", 2, "--tree-size", 2, "--count-trees", "--check")
    assert code == 0 and report["result"] == 1
    assert report["details"]["count_trees"] == 2
    assert report["cross_checks"][0]["agree"]


def test_machine_normalize_and_compile(capsys, tmp_path):
    out = tmp_path / "n.machine.json"
    code, _ = run(capsys, "machine", "normalize", DATA / "fan4.machine.json", "-o", out, "--budget", 6)
    assert code == 0 and out.exists()
    code, report = run_json(capsys, "machine", "compile", out, "--space", 2, "--tree-size", 20, "--check")
    assert code == 0 and report["cross_checks"][0]["agree"]


def test_cfg_commands(capsys, tmp_path):
    g = DATA / "anbn.grammar.json"
    assert run_json(capsys, "cfg", "count", g, "-n", 6, "--check")[1]["result"] == 1
    assert run_json(capsys, "cfg", "upto", g, "-n", 6, "--check")[1]["result"] == 4
    code, report = run_json(capsys, "cfg", "estimate", g, "-n", 6, "--samples", 5, "--seed", 3, "--check")
    assert code == 0 and report["result"]["value"] == 1.0 and report["seed"] == 3
    assert run_json(capsys, "cfg", "ambig", DATA / "catalan.grammar.json", "-n", 3)[1]["result"] == "ambiguous"
    code, _ = run(capsys, "cfg", "cnf", g, "-o", tmp_path / "c.json", "-n", 4, "--check")
    assert code == 0 and io.load(tmp_path / "c.json", "grammar").start


def test_wfwalks_command(capsys):
    args = ("wfwalks", DATA / "brackets.graph.json", DATA / "brackets.oc.json",
            "--from", "s", "--to", "t", "-n", 8, "--upto", "--oracle", "--machine-check")
    code, report = run_json(capsys, *args)
    assert code == 0 and report["result"] == 46
    assert len(report["cross_checks"]) == 2 and all(c["agree"] for c in report["cross_checks"])
    code, strict = run_json(capsys, *args, "--strict")
    assert code == 0 and strict["details"]["semantics"] == "strict" and strict["result"] <= 46


def test_acq_command(capsys):
    files = [DATA / f"chain.{k}.json" for k in ("database", "query", "jointree")]
    code, report = run_json(capsys, "acq", *files, "--oracle")
    assert code == 0 and report["result"] == 1
    code, report = run_json(capsys, "acq", *files[:2])
    assert code == 0 and "join_tree" in report["details"]


def test_text_output(capsys):
    code, out = run(capsys, "cfg", "count", DATA / "catalan.grammar.json", "-n", 3, "--check")
    assert code == 0
    assert out.out.startswith("cfg count: 1") and "[agree]" in out.out


def test_bad_input_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, out = run(capsys, "cfg", "count", bad)
    assert code == 2 and "bad.json:1:2" in out.err


def test_invalid_join_tree_exit_code(capsys, tmp_path):
    t = tmp_path / "t.json"
    io.dump(JoinTree(1, {0: 1, 2: 1, 3: 2}), t)
    code, _ = run(capsys, "acq", DATA / "chain.database.json", DATA / "chain.query.json", t)
    assert code == 2


def test_cap_exit_code(capsys, monkeypatch):
    code, out = run(capsys, "cfg", "count", DATA / "mixed.grammar.json", "-n", 8, "--cap-words", 3)
    assert code == 3 and "cap" in out.err
    monkeypatch.setenv("SPANALT_CAP_WORDS", "3")
    assert run(capsys, "cfg", "count", DATA / "mixed.grammar.json", "-n", 8)[0] == 3


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("SPANALT_SEED", "17")
    code, report = run_json(capsys, "cfg", "estimate", DATA / "mixed.grammar.json", "-n", 3, "--samples", 4)
    assert code == 0 and report["seed"] == 17
    code, again = run_json(capsys, "cfg", "estimate", DATA / "mixed.grammar.json", "-n", 3,
                           "--samples", 4, "--seed", 17)
    assert again["result"] == report["result"]


def test_bad_environment_value(capsys, monkeypatch):
    monkeypatch.setenv("SPANALT_SEED", "x")
    assert run(capsys, "cfg", "count", DATA / "anbn.grammar.json")[0] == 2


def test_disagreement_exit_code(capsys, monkeypatch):
    from spanalt import wfwalks
    monkeypatch.setattr(wfwalks, "oracle_wf_walks", lambda *a, **k: -1)
    code, report = run_json(capsys, "wfwalks", DATA / "triangle.graph.json", DATA / "brackets.oc.json",
                            "--from", "s", "--to", "t", "-n", 3, "--oracle")
    assert code == 1 and not report["cross_checks"][0]["agree"]


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["cfg", "count"])
    assert info.value.code == 2


def test_two_branch_fixture_matches_file():
    assert io.dumps(io.load(DATA / "two_branch.machine.json", "machine")) == io.dumps(two_branch("a", "a"))

import json

import pytest

from hmlkit import read_aut
from hmlkit.cli import main

EDGE_AUT = 'des (0, 1, 2)\n(0, "a", 1)\n'
PAIRS_AUT = 'des (0, 3, 4)\n(0, "a", 1)\n(2, "a", 3)\n(3, "a", 3)\n'
LOOP_AUT = 'des (0, 1, 2)\n(0, "a", 0)\n'


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {"edge.aut": EDGE_AUT, "pairs.aut": PAIRS_AUT, "loop.aut": LOOP_AUT}.items():
        (tmp_path / name).write_text(text)
        paths[name.split(".")[0]] = str(tmp_path / name)
    ccs = tmp_path / "proc.ccs"
    ccs.write_text("A = a.A\nB = a.B + a.0\nA\nB\n")
    paths["ccs"] = str(ccs)
    forms = tmp_path / "forms.hml"
    forms.write_text("# a comment\n<a>tt\n[a]ff\n")
    paths["forms"] = str(forms)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize(
    "state, formula, code, text",
    [("0", "<a>tt", 0, "true"), ("1", "<a>tt", 1, "false"), ("1", "[a]ff", 0, "true")],
)
def test_check_exit_codes(files, capsys, state, formula, code, text):
    assert run(capsys, "check", files["edge"], state, formula)[:2] == (code, text + "\n")


def test_check_usage_errors(files, capsys):
    code, out, err = run(capsys, "check", files["edge"], "0", "<b>tt")
    assert code == 2 and "b" in err and out == ""
    assert run(capsys, "check", files["edge"], "0", "<a>")[0] == 2
    assert run(capsys, "check", files["edge"], "7", "tt")[0] == 2
    assert run(capsys, "check", files["edge"] + ".missing", "0", "tt")[0] == 2
    assert run(capsys, "check", files["edge"], "0")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_check_formula_file(files, capsys):
    code, out, _ = run(capsys, "check", files["edge"], "0", "-f", files["forms"])
    assert code == 1
    assert out.splitlines() == ["true\t<a>tt", "false\t[a]ff"]


def test_both_semantics(files, capsys):
    for state in ("0", "1", "2", "3"):
        for phi in ("<a>tt", "<a>[a]ff", "[a]<a>tt | ff"):
            assert run(capsys, "check", files["pairs"], state, phi, "--both-semantics")[0] in (0, 1)


def test_denote(files, capsys):
    assert run(capsys, "denote", files["edge"], "<a>tt")[:2] == (0, "0\n")
    assert run(capsys, "denote", files["edge"], "[a]ff")[:2] == (0, "1\n")
    assert run(capsys, "denote", files["edge"], "ff")[:2] == (0, "\n")


def test_bisim(files, capsys):
    assert run(capsys, "bisim", files["pairs"], "0", "2")[:2] == (1, "not-bisimilar\n")
    assert run(capsys, "bisim", files["pairs"], "1", "1")[:2] == (0, "bisimilar\n")
    assert run(capsys, "bisim", files["pairs"])[:2] == (0, "0\n1\n2 3\n")
    assert run(capsys, "bisim", files["edge"], "0")[0] == 2


def test_distinguish(files, capsys):
    code, out, _ = run(capsys, "distinguish", files["pairs"], "0", "2")
    assert code == 1
    assert out.splitlines() == ["<a>[a]ff", "satisfied by 0, not by 2"]
    code, out, _ = run(capsys, "distinguish", files["loop"], "1", "0")
    assert out.splitlines()[0] == "[a]ff"
    assert run(capsys, "distinguish", files["pairs"], "1", "1")[:2] == (0, "equivalent\n")


def test_theory_eq(files, capsys):
    assert run(capsys, "theory-eq", files["loop"], "0", "1")[:2] == (1, "not-theory-equivalent\n")
    assert run(capsys, "theory-eq", files["loop"], "0", "0", "--oracle", "3", "1")[0] == 0
    code, out, _ = run(capsys, "--json", "theory-eq", files["loop"], "0", "1", "--oracle", "3", "1")
    assert code == 1
    assert json.loads(out)["result"] == {"theory_eq": False, "method": "bisimilarity", "bounded": False, "witness": "<a>tt"}


def test_oracle_disagreement_is_an_invariant_violation(files, capsys):
    # depth 1 cannot see the difference between 0 and 2 in the pairs LTS
    code, _, err = run(capsys, "theory-eq", files["pairs"], "0", "2", "--oracle", "7", "1")
    assert code == 3 and "invariant" in err
    assert run(capsys, "theory-eq", files["pairs"], "0", "2", "--oracle", "7", "2")[0] == 1


def test_oracle_refuses_large_instances(files, capsys):
    assert run(capsys, "theory-eq", files["pairs"], "0", "2", "--oracle", "9", "2")[0] == 2


def test_ccs_command(files, capsys, tmp_path):
    out_aut = tmp_path / "out.aut"
    code, out, _ = run(capsys, "ccs", files["ccs"], "--emit-aut", str(out_aut))
    assert code == 0
    assert out.splitlines() == ["states: 3", "transitions: 3", "0\tA", "1\tB", "2\t0"]
    lts = read_aut(out_aut.read_text())
    assert lts.num_states == 3 and lts.labels == ("a",)
    code, out, _ = run(capsys, "ccs", files["ccs"], "a.0 | 'a.0")
    assert out.splitlines()[:2] == ["states: 4", "transitions: 5"]


def test_ccs_budget_and_errors(files, capsys, tmp_path):
    assert run(capsys, "ccs", files["ccs"], "--max-states", "2")[0] == 2
    bad = tmp_path / "bad.ccs"
    bad.write_text("A = A + a.0\nA\n")
    code, _, err = run(capsys, "ccs", str(bad))
    assert code == 2 and "unguarded" in err


def test_ccs_files_as_lts_input(files, capsys):
    assert run(capsys, "bisim", files["ccs"], "A", "B")[:2] == (1, "not-bisimilar\n")
    assert run(capsys, "bisim", files["ccs"], "A", "a.A")[:2] == (0, "bisimilar\n")
    assert run(capsys, "check", files["ccs"], "B", "<a>[a]ff")[0] == 0
    code, out, _ = run(capsys, "distinguish", files["ccs"], "B", "A")
    assert out.splitlines()[1] == "satisfied by 1 [B], not by 0 [A]"


def test_json_is_deterministic(files, capsys):
    runs = [run(capsys, "--json", "distinguish", files["pairs"], "0", "2")[1] for _ in range(3)]
    assert len(set(runs)) == 1
    doc = json.loads(runs[0])
    assert list(doc) == sorted(doc)
    assert doc["result"] == {"equivalent": False, "formula": "<a>[a]ff", "satisfied_by": 0, "refuted_by": 2}
    assert doc["exit"] == 1 and "ms" not in doc
    doc = json.loads(run(capsys, "--json", "--timing", "bisim", files["pairs"])[1])
    assert doc["result"] == [[0], [1], [2, 3]] and doc["ms"] >= 0


def test_json_errors(files, capsys):
    code, out, _ = run(capsys, "--json", "check", files["edge"], "0", "<b>tt")
    doc = json.loads(out)
    assert code == 2 and doc["exit"] == 2 and "b" in doc["error"]

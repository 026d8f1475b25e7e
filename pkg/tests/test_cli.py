import json
import subprocess
import sys
from pathlib import Path

import pytest

from genjac.cli import main

CURVES = Path(__file__).resolve().parent.parent / "demos" / "curves"
NODE = str(CURVES / "node.json")
NODE_B = str(CURVES / "node_b.json")
NODE_HALF = str(CURVES / "node_half.json")
CUSP = str(CURVES / "cusp.json")
GENUS3 = str(CURVES / "genus3.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    assert code == 0, err
    return json.loads(out)


def test_genus_node_and_cusp(capsys):
    code, out, _ = run(capsys, "genus", NODE)
    assert code == 0 and "pi = 2" in out
    code, out, _ = run(capsys, "genus", CUSP)
    assert code == 0 and "pi = 2" in out
    doc = run_json(capsys, "genus", CUSP)
    assert (doc["pi"], doc["k"], doc["p"], doc["delta"]) == (2, 0, 1, 1)


def test_malformed_json_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "genus", str(bad))
    assert code == 2 and err.startswith("error:")


def test_missing_file_and_bad_args(capsys):
    assert run(capsys, "genus", "/nonexistent.json")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_inline_descriptor(capsys):
    doc = json.loads((CURVES / "node.json").read_text())
    assert run_json(capsys, "genus", json.dumps(doc))["pi"] == 2


def test_period_matrix_node_closed(capsys):
    doc = run_json(capsys, "period-matrix", NODE)
    ent = [[complex(*c) for c in row] for row in doc["entries"]]
    assert doc["labels"] == ["alpha1", "beta1", "gamma1"]
    assert ent[0] == [1, 2j, 0]
    assert abs(ent[1][1] - 2 ** -0.5) < 1e-15 and ent[1][2] == 1


def test_period_matrix_verify(capsys):
    doc = run_json(capsys, "period-matrix", NODE, "--mode", "verify")
    assert doc["agree"] and doc["max_deviation"] < 1e-8


def test_period_matrix_genus3_capability(capsys):
    for mode in ("closed", "numeric", "verify"):
        code, _, err = run(capsys, "period-matrix", GENUS3, "--mode", mode)
        assert code == 2 and "error" in err


def test_classify_examples(capsys):
    assert run_json(capsys, "classify", CUSP)["description"] == "C x J(X)"
    assert run_json(capsys, "classify", NODE_HALF)["description"] == "C* x torus"
    doc = run_json(capsys, "classify", NODE)
    assert doc["description"] == "quasi-abelian, kind 0" and doc["kind0"]


def test_classify_matrix_input(capsys, tmp_path):
    pm = run(capsys, "period-matrix", NODE_HALF, "--json")[1]
    f = tmp_path / "pm.json"
    f.write_text(pm)
    assert run_json(capsys, "classify", str(f))["description"] == "C* x torus"


def test_equiv(capsys):
    doc = run_json(capsys, "equiv", NODE, NODE_B, "--bound", "1")
    assert doc["equivalent"] and doc["witness"] is not None
    doc = run_json(capsys, "equiv", NODE, NODE_HALF, "--bound", "1")
    assert not doc["equivalent"]
    code, _, _ = run(capsys, "equiv", NODE, NODE_HALF, "--bound", "1", "--strict")
    assert code == 1


def test_nodal_equiv(capsys):
    code, out, _ = run(capsys, "nodal-equiv", NODE, NODE_B)
    assert code == 0 and "biholomorphic" in out
    doc = run_json(capsys, "nodal-equiv", NODE, NODE_HALF)
    assert doc["biholomorphic"] is False and doc["albanese_isomorphic"] is False


def test_abel_check(capsys):
    doc = run_json(capsys, "abel-check", NODE, "--function", "3")
    assert doc["passes"] and doc["divisor"] == []
    # pole on S is an input error
    assert run(capsys, "abel-check", NODE, "--function", "wp(z)")[0] == 2


def test_rr(capsys):
    doc = run_json(capsys, "rr", NODE, "--divisor", "0")
    assert (doc["chi"], doc["h0"], doc["h1"]) == (-1, 1, 2)
    doc = run_json(capsys, "rr", NODE, "--divisor", "2*A - B")
    assert doc["degree"] == 1 and doc["chi"] == 0


def test_eval(capsys):
    doc = run_json(capsys, "eval", NODE, "--function", "wp(z)", "--at", "0.3")
    assert abs(complex(*doc["value"]) - 11.789906011032526) < 1e-9
    code, _, err = run(capsys, "eval", NODE, "--function", "wp(z", "--at", "0.3")
    assert code == 2 and "error" in err


def test_human_complex_format(capsys):
    _, out, _ = run(capsys, "period-matrix", NODE)
    assert "0.707106781187+0i" in out


def test_deterministic_subprocess():
    cmd = [sys.executable, "-m", "genjac", "classify", NODE, "--json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["description"] == "quasi-abelian, kind 0"


def test_stdin_input():
    res = subprocess.run([sys.executable, "-m", "genjac", "genus", "-", "--json"],
                         input=(CURVES / "cusp.json").read_text(), capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["pi"] == 2


def test_rr_rejects_support_on_s(capsys):
    assert run(capsys, "rr", NODE, "--divisor", "P1")[0] == 2

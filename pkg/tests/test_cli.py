import json
import subprocess
import sys

import pytest

from etk.cli import run
from etk.groups import builtin
from etk.tensors import named_tensor

BUILTIN_ARGS = [
    ["--group", "trivial", "--n", "3"],
    ["--group", "gl", "--n", "3"],
    ["--group", "sl", "--n", "3"],
    ["--group", "so", "--n", "3"],
    ["--group", "o", "--n", "3"],
    ["--group", "u", "--n", "2"],
    ["--group", "diagonal", "--n", "3"],
    ["--group", "block", "--n", "3", "--s", "1"],
    ["--group", "product_oo", "--n1", "2", "--n2", "2"],
    ["--group", "signs", "--n", "3"],
    ["--group", "finite", "--generators", "[[[0, 1], [1, 0]]]"],
]


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_json(capsys):
    code, out, _ = call(capsys, "classify", "--group", "so", "--n", "3", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["curvature"]["dim"] == 1
    assert doc["torsion"]["dim"] == 1
    assert doc["inner_torsion"]["dim"] == 0
    assert doc["schema_version"] == 1


def test_classify_product_with_filter(capsys):
    code, out, _ = call(capsys, "classify", "--group", "product_oo", "--n1", "2", "--n2", "2", "--g-valued-filter")
    assert code == 0
    assert "dim R = 3" in out and "dim R (g-valued) = 2" in out


def test_json_output_is_stable(capsys, tmp_path):
    argv = ["classify", "--group", "u", "--n", "1", "--format", "json", "--seed", "5"]
    _, first, _ = call(capsys, *argv)
    _, second, _ = call(capsys, *argv)
    assert first == second
    out = tmp_path / "r.json"
    assert call(capsys, *argv, "--out", str(out))[0] == 0
    assert out.read_text() == first


def test_catalog(capsys):
    code, out, _ = call(capsys, "catalog")
    assert code == 0
    for fam in ("trivial", "gl", "sl", "so", "o", "u", "diagonal", "block", "product_oo", "signs", "finite"):
        assert any(line.startswith(fam + " ") for line in out.splitlines()), fam
    code, out, _ = call(capsys, "catalog", "--n", "4", "--format", "json")
    rows = json.loads(out)["groups"]
    assert next(r for r in rows if r["family"] == "so")["lie_algebra_dim"] == 6


@pytest.mark.parametrize("args", BUILTIN_ARGS, ids=lambda a: a[1])
def test_check_every_builtin(capsys, args):
    code, out, _ = call(capsys, "check", *args)
    assert code == 0, out
    assert "valid" in out


def test_check_group_file(capsys, tmp_path):
    good = tmp_path / "o3.json"
    good.write_text(json.dumps(builtin("o", n=3).to_dict()))
    assert call(capsys, "check", "--group-file", str(good))[0] == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "bad", "n": 2, "lie_algebra": [[[0, 1], [0, 0]]],
                               "component_reps": [[[0, 1], [1, 0]]]}))
    code, out, _ = call(capsys, "check", "--group-file", str(bad), "--format", "json")
    assert code == 1
    assert json.loads(out)["violations"][0]["kind"] == "ad-invariance"
    code, _, err = call(capsys, "classify", "--group-file", str(bad))
    assert code == 1 and "ad-invariance" in err


def test_check_tensor_invariance(capsys, tmp_path):
    path = tmp_path / "k0.json"
    path.write_text(json.dumps(named_tensor("K0", n=3).to_dict()))
    code, out, _ = call(capsys, "check", "--group", "so", "--n", "3", "--tensor", str(path))
    assert code == 0 and "invariant" in out
    code, out, _ = call(capsys, "check", "--group", "gl", "--n", "3", "--tensor", str(path))
    assert code == 1 and "NOT invariant" in out


def test_model(capsys, tmp_path):
    path = tmp_path / "so3.json"
    half = {k: "1/2" for k in ("123", "231", "312")}
    half.update({k: "-1/2" for k in ("213", "321", "132")})
    path.write_text(json.dumps({"n": 3, "lambda": {"123": 1, "231": 1, "312": 1}, "gamma": half}))
    code, out, _ = call(capsys, "model", str(path), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["torsion_free"] and doc["curvature"]["1,2,1,2"] == "-1/4"
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps({"n": 3, "lambda": {"123": 1, "131": 1}}))
    code, _, err = call(capsys, "model", str(broken))
    assert code == 1 and "Jacobi" in err


def test_exit_codes(capsys, tmp_path, monkeypatch):
    assert call(capsys, "frobnicate")[0] == 2
    assert call(capsys)[0] == 2
    assert call(capsys, "classify")[0] == 2
    assert call(capsys, "classify", "--group", "so")[0] == 2
    assert call(capsys, "classify", "--group", "so", "--n", "3", "--group-file", "x.json")[0] == 2
    assert call(capsys, "classify", "--group-file", str(tmp_path / "missing.json"))[0] == 1
    assert call(capsys, "model", str(tmp_path / "missing.json"))[0] == 1
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert call(capsys, "check", "--group-file", str(junk))[0] == 1
    monkeypatch.setenv("ETK_MAX_N", "3")
    code, _, err = call(capsys, "classify", "--group", "u", "--n", "2")
    assert code == 2 and "ETK_MAX_N" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "etk", "classify", "--group", "so", "--n", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "dim R = 1" in proc.stdout

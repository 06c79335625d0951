import json
import subprocess
import sys

import pytest

from chiralgerbe.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_text(capsys):
    code, out, _ = run(["verify", "group-law", "--trials", "2", "--deg", "4"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "suite group-law: n=2 deg=4 trials=2 seed=0"
    assert "[PASS] (4.2)" in out
    assert out.endswith("overall: PASS\n")


def test_verify_structured(capsys):
    code, out, _ = run(["verify", "cocycles", "--trials", "2", "--deg", "4", "--n", "1", "--format", "structured"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["ok"] and doc["suite"] == "cocycles"
    assert all(c["passed"] == c["total"] == 2 for c in doc["checks"])


def test_failing_suite_exits_one(capsys):
    code, out, _ = run(["verify", "automorphisms", "--n", "3", "--trials", "2", "--deg", "5"], capsys)
    assert code == 1
    assert "[FAIL] Lemma 6.1 (4.6b)" in out


def test_degree_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("CHIRALGERBE_DEG", "4")
    code, out, _ = run(["verify", "group-law", "--trials", "1"], capsys)
    assert code == 0 and "deg=4" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "nonsense"],
        ["verify", "group-law", "--deg", "2"],
        ["verify", "group-law", "--trials", "0"],
        ["cech"],
        ["cech", "--space", "p2", "--atlas", "x.json"],
    ],
)
def test_usage_errors(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_cech_space(capsys):
    code, out, _ = run(["cech", "--space", "p2", "--bundle", "O(1)"], capsys)
    assert code == 0
    assert "c(0, 1, 2) = [[0, (3)/(2*b1*b2)], [(-3)/(2*b1*b2), 0]]" in out
    assert "c_super(0, 1, 2) = [[0, (1)/(b1*b2)], [(-1)/(b1*b2), 0]]" in out


def test_cech_atlas_file(tmp_path, capsys):
    path = tmp_path / "p1.json"
    path.write_text(json.dumps({"nvars": 1, "charts": ["U", "V"], "transitions": {"U>V": ["1/b1"], "V>U": ["1/b1"]}}))
    code, out, _ = run(["cech", "--atlas", str(path)], capsys)
    assert code == 0 and "all discrepancies vanish" in out


def test_cech_bad_atlas(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"nvars": 1, "charts": ["U", "V"], "transitions": {"U>V": ["1/b1"], "V>U": ["2/b1"]}}))
    code, _, err = run(["cech", "--atlas", str(path)], capsys)
    assert code == 2 and "atlas error" in err
    code, _, err = run(["cech", "--atlas", str(tmp_path / "missing.json")], capsys)
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "chiralgerbe", "verify", "cech"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and "overall: PASS" in proc.stdout

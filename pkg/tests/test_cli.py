from __future__ import annotations

import json
import subprocess
import sys

import pytest

from horotree.cli import main


def run(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["tables", "--radius", "3", "--verify"],
        ["radon", "--radius", "2"],
        ["invert", "--radius", "2", "--kind", "edge"],
        ["invert", "--radius", "2", "--kind", "flag", "--choice", "2"],
        ["cavalieri", "--radius", "2"],
        ["roundtrip", "--radius", "2"],
        ["spectral", "--grid", "64", "--radius", "2"],
        ["symbol", "--grid", "16"],
        ["flag-demo"],
        ["support-demo", "--radius", "1"],
    ],
)
def test_commands_succeed_and_are_deterministic(capsys, argv):
    code1, out1 = run(capsys, *argv)
    code2, out2 = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2 and out1


def test_tables_content(capsys):
    _, out = run(capsys, "tables", "--radius", "3", "--q", "3")
    kv = out.split("# k_v\n")[1].split("#")[0].splitlines()
    assert kv[0] == "n,m=0,m=1,m=2,m=3"
    assert kv[1 + 2] == "-1,0,3,0,6"


def test_counterexample_report(capsys):
    code, out = run(capsys, "cavalieri", "--counterexample", "--depth", "4")
    assert code == 0
    assert "1,-2/3" in out.splitlines()


def test_json_and_out_dir(capsys, tmp_path):
    code, out = run(capsys, "roundtrip", "--radius", "2", "--format", "json")
    rows = json.loads(out)
    assert [r["kind"] for r in rows] == ["vertex", "edge", "flag"]
    assert all(r["max_inversion_error"] == "0" for r in rows)
    run(capsys, "tables", "--radius", "2", "--out", str(tmp_path / "t"))
    assert sorted(p.name for p in (tmp_path / "t").iterdir()) == ["coeffs.csv", "k_e.csv", "k_v.csv", "psi.csv"]


def test_input_file(capsys, tmp_path):
    src = tmp_path / "f.json"
    src.write_text(json.dumps({"kind": "vertex", "q": 2, "values": {"": "1", "01": "-1/2"}}))
    code, out = run(capsys, "invert", "--input", str(src), "--radius", "2")
    assert code == 0
    assert "01,-1/2,-1/2" in out


def test_argument_validation(capsys):
    assert main(["radon", "--radius", "3", "--depth", "2"]) == 2
    assert main(["spectral", "--grid", "15"]) == 2
    with pytest.raises(SystemExit):
        main(["nope"])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "horotree", "symbol", "--grid", "4"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("t,psi_hat_v")

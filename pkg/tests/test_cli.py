import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from qcond.cli import RunConfig, UsageError, main


def _run(tmp_path, name, *args):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


def _csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_run_config_invariants():
    with pytest.raises(UsageError):
        RunConfig(restarts=0)
    with pytest.raises(UsageError):
        RunConfig(grid_points=1)
    with pytest.raises(UsageError):
        RunConfig(n_quad=0)


def test_curve_match(tmp_path, capsys):
    code, out = _run(tmp_path, "cm.csv", "curve-match", "--r", "0", "0", "0", "--s", "0", "0", "1")
    assert code == 0
    rows = _csv(out)
    assert len(rows) == 101
    assert max(float(r["abs_diff"]) for r in rows) <= 1e-5
    assert "max_abs_diff=" in capsys.readouterr().err
    code, out = _run(tmp_path, "same.csv", "curve-match", "--r", ".2", "0", ".1", "--s", ".2", "0", ".1")
    assert code == 0
    assert all(float(r["mi_quantum"]) == 0 and float(r["mi_classical"]) == 0 for r in _csv(out))
    assert main(["curve-match", "--r", "0", "0", "0", "--s", "0", "0", "1.5"]) == 2


def test_ks_verify(capsys):
    assert main(["ks-verify", "--restarts", "2"]) == 0
    text = capsys.readouterr().out
    rows = dict(line.split(",", 1) for line in text.strip().splitlines()[1:])
    assert int(rows["independence_number"]) == 5
    assert abs(float(rows["H(X|F)"]) - np.log2(6)) <= 1e-9
    assert abs(float(rows["H(Y|F)"]) - np.log2(18)) <= 1e-9
    assert float(rows["gap_margin_card6"]) > 0.05
    assert main(["ks-verify", "--inject-typo"]) == 1


def test_chsh(tmp_path):
    code, out = _run(tmp_path, "c.csv", "chsh", "--eps-min", "1", "--eps-max", "1")
    assert code == 0
    (row,) = _csv(out)
    assert list(row) == ["eps", "p", "classical_cost", "ic_lower_bound", "one_minus_h_eps"]
    assert float(row["ic_lower_bound"]) == 1.0 and abs(float(row["classical_cost"]) - 1) <= 2e-3
    assert main(["chsh", "--eps-min", "0.7", "--eps-max", "0.2"]) == 2


def test_regions(tmp_path):
    inst = tmp_path / "i.json"
    rng = np.random.default_rng(2)
    inst.write_text(json.dumps({"sizes": [2, 2, 2], "p": rng.dirichlet(np.ones(8)).tolist()}))
    code, out = _run(tmp_path, "r.csv", "regions", str(inst), "--mode", "both", "--restarts", "6")
    assert code == 0
    vals = {r["mode"]: float(r["value"]) for r in _csv(out)}
    assert vals["quantum"] >= vals["classical"] - 1e-4
    bits = tmp_path / "bits.json"
    bits.write_text(json.dumps({"sizes": [2, 2, 1], "p": [0.25] * 4}))
    code, out = _run(tmp_path, "gw.csv", "regions", str(bits), "--mode", "gw", "--samples", "20")
    assert code == 0
    pts = np.array([[float(r[c]) for c in ("c0", "c1", "c2", "c3")] for r in _csv(out)])
    assert np.min(np.abs(pts - [0, 1, 1, 0]).max(1)) < 1e-12
    assert np.min(np.abs(pts - [2, 0, 0, 0]).max(1)) < 1e-12
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["regions", str(bad)]) == 2
    bad.write_text(json.dumps({"sizes": [2, 2, 2], "p": [0.5] * 8}))
    assert main(["regions", str(bad)]) == 2
    assert main(["regions", str(tmp_path / "missing.json")]) == 2


def test_minimax_small(tmp_path):
    code, out = _run(tmp_path, "m.csv", "minimax", "--instances", "1", "--restarts", "6",
                     "--midpoint-pairs", "3")
    rows = _csv(out)
    assert len(rows) == 1
    assert float(rows[0]["midpoint_deviation"]) <= 1e-9
    assert code == (0 if abs(float(rows[0]["gap"])) <= 5e-3 else 1)


def test_reproducible_and_json_matches_csv(tmp_path):
    args = ["curve-match", "--r", "0.1", "0.2", "0.3", "--s", "-0.4", "0", "0.5", "--grid", "11"]
    _, a = _run(tmp_path, "a.csv", *args)
    _, b = _run(tmp_path, "b.csv", *args)
    assert a.read_bytes() == b.read_bytes()
    _, j = _run(tmp_path, "a.json", *args, "--format", "json")
    doc = json.loads(j.read_text())
    rows = _csv(a)
    for r, d in zip(rows, doc["rows"]):
        for k in r:
            assert float(r[k]) == d[k]
    assert doc["summary"]["pass"] is True


def test_usage_errors():
    assert main([]) == 2
    assert main(["nonsense"]) == 2
    assert main(["chsh", "--format", "xml"]) == 2
    assert main(["chsh", "--grid", "1"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qcond.cli", "chsh", "--eps-min", "0", "--eps-max", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("eps,p,classical_cost")

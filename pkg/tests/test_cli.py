import csv
import json

import numpy as np
import pytest

from hypergeo import cli
from hypergeo.rootsys import build_root_system


def _run(tmp_path, *args):
    code = cli.run(["--out", str(tmp_path), *args])
    name = args[0] if args[0] != "residual" else "residual-enumerate"
    data = json.loads((tmp_path / f"{name}.json").read_text()) if (tmp_path / f"{name}.json").exists() else None
    rows = None
    if (tmp_path / f"{name}.csv").exists():
        rows = list(csv.DictReader((tmp_path / f"{name}.csv").open()))
    return code, data, rows


def test_roots(tmp_path, capsys):
    code, data, rows = _run(tmp_path, "roots", "--family", "B", "--rank", "2")
    assert code == 0
    assert len(rows) == 8
    assert data["coxeter_number"] == 4
    assert data["config"]["family"] == "B"


def test_volume_negative_rationals(tmp_path, capsys):
    code, data, rows = _run(tmp_path, "volume", "--family", "A", "--rank", "1", "--k", "-1/4", "--k", "-0.1")
    assert code == 0
    assert [r["k"] for r in rows] == ["-1/4", "-1/10"]
    assert all(r["pass"] == "True" for r in rows)
    assert data["config"]["k"] == ["-1/4", "-1/10"]


def test_options_after_subcommand(tmp_path, capsys):
    out = tmp_path / "late"
    code = cli.run(["volume", "--family", "A", "--rank", "1", "--k", "-1/5", "--out", str(out), "--jobs", "1"])
    assert code == 0
    assert (out / "volume.csv").exists()


def test_eval_c_and_F(tmp_path, capsys):
    code, data, rows = _run(tmp_path, "eval", "c", "--family", "A", "--rank", "1", "--k", "-1/4",
                            "--lam", "-1/8")
    assert code == 0
    # c(rho) = 1 where rho = -1/8 alpha for k = -1/4
    assert data["rows"][0]["c"] == pytest.approx([1.0, 0.0], abs=1e-13)
    R = build_root_system("A", 2)
    pts = [-np.linalg.solve(R.embedding.T, np.array(t)) for t in ([0.3, 0.1], [1.0, 2.0])]
    xs = ";".join(",".join(repr(float(v)) for v in p) for p in pts)
    # F(rho(k)) = 1 identically
    code, data, rows = _run(tmp_path, "eval", "F", "--family", "A", "--rank", "2", "--k", "-1/4",
                            "--lam", "-1/4,-1/4", "--x", xs)
    assert code == 0
    assert all(abs(complex(*r["F"]) - 1) < 1e-12 for r in data["rows"])


def test_residual_and_spectrum(tmp_path, capsys):
    code, data, rows = _run(tmp_path, "residual", "enumerate", "--family", "A", "--rank", "1", "--k", "-1/4")
    assert code == 0
    assert [s["dim"] for s in data["subspaces"]] == [1, 0, 0]
    assert all("cuspidal" in s["flags"] for s in data["subspaces"][1:])
    code, data, rows = _run(tmp_path, "spectrum", "--family", "A", "--rank", "2")
    assert code == 0
    assert rows[0]["sigma"] == "-1/3 0"


def test_norm_and_failure_exit(tmp_path, capsys):
    code, data, rows = _run(tmp_path, "norm", "--family", "A", "--rank", "1", "--grid", "-3/20;-1/4;-7/20")
    assert code == 0
    assert all(float(r["constant"]) == pytest.approx(2, rel=1e-6) for r in rows)
    # a grid outside every family simplex reports a failure
    code, data, rows = _run(tmp_path, "norm", "--family", "A", "--rank", "1", "--grid", "-3/5;-7/10")
    assert code == 1
    assert data["pass"] is False


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        cli.run(["volume", "--family", "A", "--rank", "1"])
    assert e.value.code == 2
    assert cli.run(["--out", str(tmp_path), "roots", "--family", "E", "--rank", "8"]) == 1
    assert '"pass": false' in capsys.readouterr().out


def test_deterministic_output(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        cli.run(["--out", str(d), "spectrum", "--family", "B", "--rank", "2"])
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()


def test_config_roundtrip():
    cfg = cli.RunConfig("volume", "A", 2, ["-1/4"], [], {"tol": "1e-3"}, "o", 2)
    assert cli.RunConfig.from_json(cfg.to_json()) == cfg

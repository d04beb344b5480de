import json
import math

import pytest

from growthspace.cli import main, parse_grid


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_grid_syntax():
    assert parse_grid("1..3") == [1.0, 2.0, 3.0]
    assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_grid("0.5, 2") == [0.5, 2.0]


def test_transform_legendre(capsys):
    code, out = run(capsys, "transform", "--fn", "exp", "--legendre", "--t", "1..10")
    rows = out.out.strip().splitlines()[1:]
    assert code == 0 and len(rows) == 10
    for row in rows:
        t, log_value, _ = (float(v) for v in row.split(","))
        assert log_value == pytest.approx(t * (1 - math.log(t)), abs=1e-9)


def test_transform_dual_at_zero(capsys):
    code, out = run(capsys, "transform", "--fn", "beta_exp:0.5", "--dual", "--r", "0", "--format", "json")
    assert code == 0
    assert json.loads(out.out)[0]["value"] == 1.0


def test_transform_series_reports_tail(capsys):
    code, out = run(capsys, "transform", "--fn", "beta_exp:0.5", "--lfn", "--r", "2", "--format", "json")
    row = json.loads(out.out)[0]
    assert code == 0 and row["terms"] > 1 and row["log_tail_bound"] < row["log_value"] - 20


def test_check_examples(capsys):
    assert run(capsys, "check", "--fn", "exp", "--cond", "U2")[0] == 0
    code, out = run(capsys, "check", "--seq", "bell:2", "--cond", "B2", "--n", "40")
    assert code == 0 and json.loads(out.out)["verdict"] == "PassOnGrid"
    code, out = run(capsys, "check", "--seq", "from-growth:exp_2", "--cond", "U2")
    assert code == 1 and json.loads(out.out)["counterexample"] is not None


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "check", "--fn", "exp")[0] == 2
    assert run(capsys, "transform", "--fn", "exp", "--dual")[0] == 2
    assert run(capsys, "verify", "no-such-suite", "--out", str(tmp_path))[0] == 2
    assert run(capsys, "verify", "stirling-sandwich", "--fn", "exp", "--out", str(tmp_path))[0] == 2
    assert run(capsys, "bogus-command")[0] == 2


def test_config_precedence_and_validation(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("[model]\nd = 3\n\n[suites.norm-sandwich]\ntrials = 4\ndegree = 3\n")
    out_dir = tmp_path / "out"
    code, _ = run(capsys, "verify", "norm-sandwich", "--config", str(cfg), "--trials", "2", "--out", str(out_dir))
    rep = json.loads((out_dir / "norm-sandwich.json").read_text())
    assert code == 0
    assert rep["notes"]["parameters"]["trials"] == 2
    assert rep["notes"]["parameters"]["d"] == 3
    assert rep["notes"]["parameters"]["degree"] == 3
    bad = tmp_path / "bad.toml"
    bad.write_text("[suites.norm-sandwich]\nsurprise = 1\n")
    assert run(capsys, "verify", "norm-sandwich", "--config", str(bad), "--out", str(out_dir))[0] == 2
    bad.write_text("[model]\nweights = [1]\n")
    assert run(capsys, "verify", "norm-sandwich", "--config", str(bad), "--out", str(out_dir))[0] == 2


def test_verify_writes_reports_and_summary(capsys, tmp_path):
    code, out = run(capsys, "verify", "double-dual", "--fn", "beta_exp:0.5", "--out", str(tmp_path))
    assert code == 0
    rep = json.loads((tmp_path / "double-dual.json").read_text())
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert rep["violations"] == 0 and rep["seed"] == 0
    assert summary["suites"][0]["suite"] == "double-dual"
    assert "PASS double-dual" in out.out


def test_verify_reports_violations_with_exit_one(capsys, tmp_path):
    code, _ = run(capsys, "verify", "double-dual", "--fn", "exp_3", "--out", str(tmp_path))
    assert code == 1


def test_csv_reports(capsys, tmp_path):
    code, _ = run(capsys, "verify", "stirling-sandwich", "--format", "csv", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "stirling-sandwich.csv").read_text().startswith("case,margin,passed")
    assert (tmp_path / "summary.csv").exists()


def test_fock_demo(capsys):
    code, out = run(capsys, "fock", "--d", "2", "--degree", "2", "--seed", "1")
    doc = json.loads(out.out)
    assert code == 0 and set(doc["norms"]) == {"test", "test_dual", "generalized", "generalized_dual"}

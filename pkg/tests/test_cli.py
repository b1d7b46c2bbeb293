import json
import subprocess
import sys

import pytest

from heavytail.cli import main
from heavytail.tail_model import TailClassSpec


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bound_json(capsys):
    code, out, _ = run(capsys, "bound", "--kind", "thm1", "--v", "1", "--alpha", "1", "--n", "10000", "--eps", "0.5")
    assert code == 0
    obj = json.loads(out)
    assert obj["kind"] == "Thm1Right" and obj["x"] == 1e6 and not obj["vacuous"]
    assert obj["raw"] == pytest.approx(0.08389056098930646, rel=1e-12)


def test_bound_from_spec_json_round_trip(capsys):
    spec = TailClassSpec(2.0, 1.0, 2.0, 1.0)
    code, out, _ = run(capsys, "bound", "--kind", "thm3", "--spec", json.dumps(spec.to_json()), "--n", "10000", "--eps", "0.25")
    assert code == 0 and json.loads(out)["kind"] == "Thm3RightCentered"


def test_bound_preasymptotic_side(capsys):
    code, out, _ = run(capsys, "bound", "--kind", "preasymptotic", "--alpha", "2", "--v", "1", "--n", "1000",
                       "--eps", "0.5", "--side", "abs")
    assert code == 0 and "right_union" in json.loads(out)["terms"]


def test_expectation(capsys):
    assert run(capsys, "expectation", "--dist", "geometric:0.5")[1].strip() == "2.0"
    assert run(capsys, "expectation", "--dist", "pareto:0.8")[1].strip() == "Divergent"
    obj = json.loads(run(capsys, "expectation", "--dist", "point:-3", "--format", "json")[1])
    assert obj["expectation"] == -3 and obj["divergent"] is False


def test_membership_exit_codes(capsys):
    assert run(capsys, "verify-membership", "--dist", "pareto:1", "--k-max", "100")[0] == 0
    code, out, _ = run(capsys, "verify-membership", "--dist", "geometric:0.5", "--alpha", "2", "--v", "1", "--k-max", "100")
    assert code == 2 and json.loads(out)["first_violation"] == 2


@pytest.mark.parametrize(
    "argv",
    [[], ["frobnicate"], ["bound", "--kind", "thm9", "--v", "1", "--alpha", "1", "--n", "10", "--eps", "0.1"],
     ["bound", "--kind", "thm1", "--alpha", "1", "--n", "10", "--eps", "0.1"],
     ["bound", "--kind", "thm1", "--v", "1", "--alpha", "2", "--n", "10", "--eps", "0.1"],
     ["expectation", "--dist", "{bad json"], ["expectation"], ["lemma-grid", "--grid", "{\"alphas\": 1}"],
     ["simulate", "--dist", "pareto:0.8", "--n", "10", "--eps", "0.1", "--trials", "5"]],
)
def test_usage_errors_exit_one(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and "error" in err


def test_lemma_grid_small_and_byte_stable(capsys, tmp_path):
    grid = '{"alphas": [0.5, 2.0], "ns": [1000], "epsilons": [0.3]}'
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "lemma-grid", "--grid", grid, "--out", str(a))[0] == 0
    assert run(capsys, "lemma-grid", "--grid", grid, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("lemma_id,alpha,n,epsilon,exact,bound,margin,pass,dist_id\n")


def test_simulate_byte_stable_and_seed_precedence(capsys, tmp_path, monkeypatch):
    base = ["simulate", "--dist", "pareto:0.8", "--n", "50", "--eps", "0.4", "--trials", "300"]
    code, out1, _ = run(capsys, *base, "--seed", "7")
    assert code == 0
    assert out1 == run(capsys, *base, "--seed", "7")[1]
    # env beats config, flag beats env
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 1}))
    monkeypatch.setenv("HEAVYTAIL_SEED", "7")
    assert run(capsys, "--config", str(cfg), *base)[1] == out1
    monkeypatch.setenv("HEAVYTAIL_SEED", "2")
    assert run(capsys, "--config", str(cfg), *base, "--seed", "7")[1] == out1
    monkeypatch.delenv("HEAVYTAIL_SEED")
    assert ",1," in run(capsys, "--config", str(cfg), *base)[1].splitlines()[1]


def test_config_supplies_command_and_options(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "bound", "kind": "thm1", "v": 1, "alpha": 1, "n": 10000, "epsilon": 0.5}))
    code, out, _ = run(capsys, "--config", str(cfg))
    assert code == 0 and json.loads(out)["raw"] == pytest.approx(0.08389056098930646, rel=1e-12)
    # flags override the file
    code, out, _ = run(capsys, "--config", str(cfg), "bound", "--n", "100")
    assert json.loads(out)["x"] == pytest.approx(1000.0)


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 10,\n "eps": }')
    code, _, err = run(capsys, "--config", str(bad), "bound")
    assert code == 1 and "line 2" in err
    bad.write_text('{"nonsense": 1}')
    assert run(capsys, "--config", str(bad), "bound")[0] == 1
    assert run(capsys, "--config", str(tmp_path / "missing.json"), "bound")[0] == 1


def test_full_report(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "grid": {"alphas": [0.5, 2.0], "ns": [1000], "epsilons": [0.3]},
        "experiments": [{"dist": "pareto:0.8", "n": 100, "eps": 0.4, "trials": 200}],
    }))
    out = tmp_path / "report"
    assert run(capsys, "--config", str(cfg), "full-report", "--out", str(out), "--seed", "3")[0] == 0
    summary = json.loads((out / "report.json").read_text())
    assert summary["lemma_failures"] == 0 and summary["experiments"] == 1
    assert len((out / "simulations.csv").read_text().splitlines()) == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "heavytail", "expectation", "--dist", "point:4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and float(proc.stdout) == 4.0

import csv
import io
import json
import subprocess
import sys

import pytest

from utilrisk.cli import COMMANDS, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, build_parser, run


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def half_file(tmp_path):
    path = tmp_path / "half.json"
    path.write_text(json.dumps({"rate": 0.0, "probs": [0.5, 0.5], "returns": [[2.0], [-1.0]]}))
    return path


@pytest.fixture
def config(tmp_path, half_file):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"scenarios": half_file.name, "utility": "mean", "risk": "es:0.5", "rmax": 0.5}))
    return path


def test_classify_example():
    code, out, _ = _run(["classify", "--utility", "mean", "--risk", "var:0.05"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["verdict"] == "IllPosed"
    assert set(doc["basis"]) >= {"U_sll", "R_sll", "R_cash_convex", "law_invariance_side"}
    assert doc["citations"]


def test_witness_csv_example():
    code, out, _ = _run(["witness", "--risk", "es:0.05", "--sr", "2.5", "--dim", "2", "--seed", "7", "--csv"])
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 20
    assert list(rows[0]) == ["n", "pi_1", "pi_2", "mean", "risk"]
    assert all(float(r["risk"]) <= 0 for r in rows)


def test_witness_not_applicable():
    code, out, _ = _run(["witness", "--risk", "es:0.05", "--sr", "2.0"])
    assert code == EXIT_OK
    assert json.loads(out)["status"] == "NotApplicable"


def test_optimize_config_example(config):
    code, out, _ = _run(["optimize", "--config", str(config)])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["status"] == "Optimal"
    assert doc["value"] == pytest.approx(0.25, abs=1e-6)
    assert doc["pi"][0] == pytest.approx(0.5, abs=1e-6)


def test_explicit_flags_override_config(config):
    code, out, _ = _run(["optimize", "--config", str(config), "--rmax", "0.0"])
    assert code == EXIT_OK
    assert json.loads(out)["value"] == pytest.approx(0.0, abs=1e-6)


def test_minrisk(half_file):
    code, out, _ = _run(["minrisk", "--scenarios", str(half_file), "--utility", "mean", "--risk", "es:0.5",
                         "--umin", "0.25"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(0.5, abs=1e-6)


def test_optimize_diverging(tmp_path):
    path = tmp_path / "skew.json"
    path.write_text(json.dumps({"rate": 0.0, "probs": [0.6, 0.4], "returns": [[2.0], [-1.0]]}))
    code, out, _ = _run(["optimize", "--scenarios", str(path), "--utility", "mean", "--risk", "var:0.5",
                         "--rmax", "0.5"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["status"] == "Diverging"
    assert len(doc["value_trace"]) == len(doc["lambdas"])


def test_eval(half_file):
    code, out, _ = _run(["eval", "--scenarios", str(half_file), "--utility", "mean", "--risk", "es:0.5",
                         "--pi", "0.5", "--w", "2"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["utility"] == pytest.approx(2.5)
    assert doc["transformed_utility"] == pytest.approx(0.5)
    assert doc["transformed_risk"] == pytest.approx(1.0)


def test_frontier_csv(half_file):
    code, out, _ = _run(["frontier", "--scenarios", str(half_file), "--utility", "mean", "--risk", "es:0.5",
                         "--grid", "0:1:3", "--csv"])
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["rmax"]) for r in rows] == [0.0, 0.5, 1.0]
    values = [float(r["value"]) for r in rows]
    assert values == sorted(values)
    assert values[1] == pytest.approx(0.25, abs=1e-6)


def test_tables_json_and_text():
    code, out, _ = _run(["tables"])
    assert code == EXIT_OK
    t1, t2 = json.loads(out)["tables"]
    assert len(t1["cells"]) == 4 and len(t2["cells"]) == 11
    code, out, _ = _run(["tables", "--text"])
    assert "Market-independent well-posedness of utility-risk portfolio selection" in out


def test_axioms_command():
    code, out, _ = _run(["axioms", "--risk", "es:0.3", "--trials", "50"])
    assert code == EXIT_OK
    assert json.loads(out)["mismatches"] == []
    code, _, err = _run(["axioms", "--risk", "es:0.3", "--utility", "mean"])
    assert code == EXIT_USAGE and "exactly one" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["classify", "--utility", "mean"],
        ["classify", "--utility", "nonsense", "--risk", "es:0.1"],
        ["frontier", "--grid", "0:1"],
        ["optimize", "--config", "/nonexistent/cfg.json"],
    ],
)
def test_usage_errors(argv):
    code, out, _ = _run(argv)
    assert code == EXIT_USAGE
    assert out == ""


def test_domain_error_threshold(half_file):
    code, out, err = _run(["optimize", "--scenarios", str(half_file), "--utility", "mean", "--risk", "es:0.5",
                           "--rmax", "-1"])
    assert code == EXIT_DOMAIN and out == ""
    assert json.loads(err)["error"]["type"] == "PreconditionError"


def test_domain_error_arbitrage(tmp_path):
    path = tmp_path / "arb.json"
    path.write_text(json.dumps({"rate": 0.0, "probs": [0.5, 0.5], "returns": [[1.0], [0.0]]}))
    code, _, err = _run(["optimize", "--scenarios", str(path), "--utility", "mean", "--risk", "es:0.5",
                         "--rmax", "0.1"])
    assert code == EXIT_DOMAIN
    assert json.loads(err)["error"]["type"] == "ArbitrageError"


@pytest.mark.parametrize(
    "argv",
    [
        ["tables"],
        ["witness", "--risk", "var:0.05", "--sr", "2.0", "--seed", "3"],
        ["axioms", "--risk", "var:0.3", "--trials", "100", "--seed", "2"],
    ],
)
def test_byte_identical_output(argv):
    assert _run(argv)[1] == _run(argv)[1]


def test_byte_identical_optimize(config):
    argv = ["optimize", "--config", str(config), "--seed", "4"]
    assert _run(argv)[1] == _run(argv)[1]


def test_floats_round_trip(half_file):
    code, out, _ = _run(["witness", "--risk", "var:0.05", "--sr", "2.0"])
    doc = json.loads(out)
    assert repr(doc["threshold"]) in out


@pytest.mark.parametrize("command", sorted(COMMANDS))
def test_every_subcommand_has_help(command, capsys):
    code, _, _ = _run([command, "--help"])
    assert code == EXIT_OK
    text = capsys.readouterr().out
    assert "usage: utilrisk " + command in text
    sub = build_parser()._subparsers._group_actions[0].choices[command]
    assert sub.description


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "utilrisk.cli", "classify", "--utility", "mean",
                           "--risk", "entropic:1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "WellPosed"

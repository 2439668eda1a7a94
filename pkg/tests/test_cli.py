import json
import os
import sys

import pandas as pd
import pytest
from pydantic import ValidationError

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from agents.report import load_report
from agents.run_config import RunConfig, parse_grid
import app
from app import run
from tools.errors import ParameterError


# --- configuration ---
def test_parse_grid():
    assert parse_grid("1024:8192:2") == [1024, 2048, 4096, 8192]
    assert parse_grid("100:1000:10") == [100, 1000]
    assert parse_grid("1:5:1.5") == [1, 2, 3, 5]
    assert parse_grid("77") == [77]


@pytest.mark.parametrize("spec", ["10:1:2", "0:10:2", "1:10:1", "a:b"])
def test_parse_grid_rejects(spec):
    with pytest.raises(ParameterError):
        parse_grid(spec)


def test_run_config_requires_options():
    with pytest.raises(ValidationError, match="requires --grid"):
        RunConfig(subcommand="verify-th1", alpha="sqrt:2")
    with pytest.raises(ValidationError, match="gcd"):
        RunConfig(subcommand="verify-th1", alpha="sqrt:2", grid="1024:2048:2", c=2, d=4)
    with pytest.raises(ValidationError, match="irrational"):
        RunConfig(subcommand="member", alpha="rat:3/2", m=4)


def test_run_config_table_limits():
    cfg = RunConfig(subcommand="verify-th2", alpha="sqrt:2", beta="0.3", grid="1000:10000:10", c=1, d=2)
    assert cfg.table_limit() == 2 * 14142 + 1
    cfg = RunConfig(subcommand="pipeline-check", alpha="sqrt:2", N=5000, delta=0.05, c=1, d=3)
    assert cfg.table_limit() == 15001


# --- primitive subcommands ---
def test_beatty_terms(capsys):
    assert run(["beatty", "--alpha", "sqrt:2", "--N", "10"]) == 0
    assert capsys.readouterr().out.strip() == "1 2 4 5 7 8 9 11 12 14"


def test_member(capsys):
    assert run(["member", "--alpha", "quad:1,1,5,2", "--m", "3"]) == 0
    assert run(["member", "--alpha", "quad:1,1,5,2", "--m", "2"]) == 0
    assert capsys.readouterr().out.split() == ["true", "false"]


def test_dirichlet_output(capsys):
    assert run(["dirichlet", "--alpha", "quad:1,1,5,2", "--K", "3"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert (data["a"], data["q"]) == (5, 3)
    assert data["satisfies"]


def test_sieve_stats(capsys):
    assert run(["sieve-stats", "--N", "100"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["prime_count"] == 25


def test_type_of_quadratic(capsys):
    assert run(["type", "--alpha", "sqrt:2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["tau_hat"] == 1.0 and data["exact"]


def test_vaaler_check_reports_stated_weights(capsys):
    assert run(["vaaler-check", "--H", "10"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["sandwich_holds"]
    assert not data["stated_weights_hold"]


def test_psi_delta_check(capsys):
    assert run(["psi-delta-check", "--gamma", "0.3", "--delta", "0.05"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["equality_holds"] and data["coefficient_bound_holds"]
    assert 0.0 <= data["min"] and data["max"] <= 1.0 + 1e-9


# --- experiments ---
def test_verify_th1_writes_report(tmp_path, capsys):
    out = tmp_path / "th1.json"
    code = run(["verify-th1", "--alpha", "sqrt:2", "--c", "1", "--d", "3",
                "--grid", "1024:8192:2", "--threads", "2", "--out", str(out)])
    assert code == 0
    report = load_report(str(out))
    assert [r.N for r in report.rows] == [1024, 2048, 4096, 8192]
    assert report.run_config["subcommand"] == "verify-th1"
    assert report.threads == 2


def test_decay_scan_csv(tmp_path):
    out = tmp_path / "decay.csv"
    assert run(["decay-scan", "--alpha", "quad:1,1,5,2", "--grid", "100:10000:10",
                "--format", "csv", "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert frame["N"].tolist() == [100, 1000, 10000]


def test_decomposition_check(tmp_path, capsys):
    out = tmp_path / "dec.json"
    assert run(["decomposition-check", "--alpha", "sqrt:2", "--beta", "-2", "--N", "5000",
                "--c", "1", "--d", "2", "--out", str(out)]) == 0
    assert float(capsys.readouterr().out.strip()) <= 1e-8


def test_sd_writes_report(tmp_path):
    out = tmp_path / "sd.json"
    assert run(["sd", "--alpha", "sqrt:2", "--N", "20000", "--c", "1", "--d", "3", "--out", str(out)]) == 0
    report = load_report(str(out))
    assert report.experiment == "sd-check"
    assert [r.extra["D"] for r in report.rows] == [0, 1]
    assert all(r.extra["sandwich_holds"] for r in report.rows)


def test_bound_comparison_command(tmp_path):
    out = tmp_path / "bound.json"
    assert run(["bound-comparison", "--alpha", "sqrt:2", "--grid", "100000", "--out", str(out)]) == 0
    report = load_report(str(out))
    assert [r.extra["q"] for r in report.rows] == [12, 29, 70, 169]
    assert report.extras["max_bound_ratio"] < 1.0
    assert run(["bound-comparison", "--alpha", "rat:3/2", "--grid", "100000"]) == 2


# --- exit codes ---
@pytest.mark.parametrize(
    "argv",
    [
        ["verify-th1", "--alpha", "sqrt:2"],
        ["verify-th1", "--alpha", "sqrt:2", "--grid", "1024:2048:2", "--c", "2", "--d", "4"],
        ["member", "--alpha", "rat:3/2", "--m", "4"],
        ["beatty", "--alpha", "pi", "--N", "5"],
        ["decomposition-check", "--alpha", "sqrt:2", "--beta", "0.5", "--N", "100"],
        ["psi-delta-check", "--gamma", "0.5", "--delta", "0.3"],
        ["no-such-command"],
    ],
)
def test_invalid_input_exits_with_2(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err


def test_unexpected_failure_exits_with_1(monkeypatch, capsys):
    def boom(cfg):
        raise RuntimeError("disk on fire")

    monkeypatch.setitem(app.COMMANDS, "beatty", boom)
    assert run(["beatty", "--alpha", "sqrt:2", "--N", "5"]) == 1
    assert "RuntimeError: disk on fire" in capsys.readouterr().err


def test_precision_failure_exits_with_1(capsys):
    assert run(["type", "--alpha", "dec:1.4142", "--depth", "30"]) == 1
    assert "PrecisionExhaustedError" in capsys.readouterr().err

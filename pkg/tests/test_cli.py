"""Command-line interface: schema, exit codes, determinism, file routing."""

import csv
import io
import json
import math

import pytest

from hftkyle import ModelParams, classify_role
from hftkyle.cli import (
    CSV_COLUMNS,
    EXIT_INVALID,
    EXIT_NO_EQUILIBRIUM,
    EXIT_OK,
    EXIT_VERIFICATION,
    MULTI_COLUMNS,
    main,
)
from hftkyle.core import Equilibrium


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_emits_documented_csv(capsys):
    code, out, _ = run_cli(capsys, "solve", "--theta1", "1", "--theta-eps", "1",
                           "--gamma", "1")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["status"] == "Found"
    assert row["role"] == "RoundTripper"
    assert row["soc1"] == "true" and row["soc3"] == "true"
    assert float(row["err_p2"]) == pytest.approx(0.5, rel=1e-10)


def test_role_column_matches_reported_coefficients(capsys):
    _, out, _ = run_cli(capsys, "solve", "--theta1", "1", "--theta-eps", "1",
                        "--gamma", "1")
    row = next(csv.DictReader(io.StringIO(out)))
    eq = Equilibrium(*[float(row[k]) for k in
                       ("Lambda1", "Lambda21", "Lambda22", "A", "beta1",
                        "beta21", "beta22", "beta23")],
                     soc_ok=(True, True, True), residual_norm=0.0)
    assert classify_role(eq).variant == row["role"]


def test_invalid_parameters_exit_one(capsys):
    code, _, err = run_cli(capsys, "solve", "--theta1", "0", "--theta-eps",
                           "1", "--gamma", "1")
    assert code == EXIT_INVALID
    assert "theta1" in err


def test_missing_equilibrium_mentions_duopoly(capsys):
    code, _, err = run_cli(capsys, "solve", "--theta1", "1", "--theta-eps",
                           "0", "--gamma", "0")
    assert code == EXIT_NO_EQUILIBRIUM
    assert "duopoly" in err


def test_limits_corner_json(capsys):
    code, out, _ = run_cli(capsys, "limits", "theta1-zero", "--theta-eps",
                           "0", "--gamma", "0", "--format", "json")
    assert code == EXIT_OK
    rec = json.loads(out)
    assert rec["beta21"] == pytest.approx(math.sqrt(2) / 2, abs=1e-14)
    assert rec["A"] == pytest.approx(math.sqrt(2) / 2, abs=1e-14)
    assert rec["pi_IT"] == pytest.approx(math.sqrt(2) / 6, abs=1e-14)


def test_limits_thresholds(capsys):
    code, out, _ = run_cli(capsys, "limits", "gamma-inf", "--thresholds",
                           "--theta1", "0.5", "--format", "json")
    assert code == EXIT_OK
    rec = json.loads(out)
    assert rec["theta_hat"] == 0.0
    assert rec["theta_tilde"] == 0.0


def test_limits_duopoly_row(capsys):
    code, out, _ = run_cli(capsys, "limits", "duopoly", "--theta1", "0.1",
                           "--gamma", "0")
    assert code == EXIT_OK
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["status"] == "FoundDuopoly"
    assert row["role"] == "SmallIT"
    assert float(row["beta1"]) == pytest.approx(0.157746, rel=1e-4)


def test_sweep_reruns_byte_identical(tmp_path, capsys):
    args = ["sweep", "--theta1", "0.1", "--theta-eps-grid", "0,0.5",
            "--gamma-grid", "0,0.1"]
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    assert run_cli(capsys, *args, "--output", str(first))[0] == EXIT_OK
    assert run_cli(capsys, *args, "--output", str(second))[0] == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    rows = list(csv.DictReader(first.open()))
    assert len(rows) == 4
    assert rows[0]["status"] == "FoundDuopoly"  # noise 0, penalty 0 corner
    assert {r["status"] for r in rows[1:]} == {"Found"}


def test_output_dir_env_routes_bare_names(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("HFTKYLE_OUTPUT_DIR", str(tmp_path))
    code, _, _ = run_cli(capsys, "solve", "--theta1", "1", "--theta-eps", "1",
                         "--gamma", "1", "--output", "point.csv")
    assert code == EXIT_OK
    assert (tmp_path / "point.csv").exists()


def test_verify_accepts_true_equilibrium(capsys):
    code, out, _ = run_cli(capsys, "verify", "--theta1", "1", "--theta-eps",
                           "1", "--gamma", "1", "--paths", "100000", "--seed",
                           "3", "--format", "json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["deviations_ok"] is True
    assert abs(report["A_consistency_drift"]) < 1e-8
    assert all(m["ok"] and abs(m["z"]) <= 4.0 for m in report["moments"])


def test_verify_rejects_tampered_strategy(tmp_path, capsys):
    eq_file = tmp_path / "eq.json"
    run_cli(capsys, "solve", "--theta1", "1", "--theta-eps", "1", "--gamma",
            "1", "--format", "json", "--output", str(eq_file))
    rec = json.loads(eq_file.read_text())
    rec["beta1"] *= 1.2
    eq_file.write_text(json.dumps(rec))
    code, _, err = run_cli(capsys, "verify", "--theta1", "1", "--theta-eps",
                           "1", "--gamma", "1", "--paths", "100000",
                           "--eq-file", str(eq_file))
    assert code == EXIT_VERIFICATION
    assert "improve" in err


def test_verify_path_floor_is_invalid_input(capsys):
    code, _, _ = run_cli(capsys, "verify", "--theta1", "1", "--theta-eps",
                         "1", "--gamma", "1", "--paths", "1000")
    assert code == EXIT_INVALID


def test_multi_baseline_grid(capsys):
    code, out, _ = run_cli(capsys, "multi", "--variant", "spillover",
                           "--gamma1-grid", "0,0.25")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["asset1_role"] for r in rows] == ["SmallIT", "RoundTripper"]
    assert {r["asset2_role"] for r in rows} == {"SmallIT"}
    assert list(rows[0]) == MULTI_COLUMNS


def test_multi_params_file_decoupled(tmp_path, capsys):
    params = {
        "p0": [0.0, 0.0],
        "Sigma_v": [[0.00036, 0.0], [0.0, 0.00036]],
        "Sigma_eps": [[0.04, 0.0], [0.0, 0.04]],
        "Sigma_1": [[0.36, 0.0], [0.0, 0.25]],
        "Sigma_2": [[1.0, 0.0], [0.0, 1.0]],
        "gamma_mat": [[0.2, 0.0], [0.0, 0.2]],
    }
    pf = tmp_path / "mp.json"
    pf.write_text(json.dumps(params))
    code, out, _ = run_cli(capsys, "multi", "--variant", "full",
                           "--params-file", str(pf))
    assert code == EXIT_OK
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["block_diag"] == "true"
    assert float(row["rho"]) == 0.0

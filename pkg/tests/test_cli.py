import csv
import json
import math
from pathlib import Path

import pytest

from dilute_anderson import cli
from dilute_anderson.cli import SWEEP_COLUMNS, main


def run_sweep(tmp_path, name, extra):
    out = tmp_path / name
    args = [
        "sweep-energy", "--k-min", "1.2", "--k-max", "1.9415926535897930", "--k-count", "3",
        "--rho", "0.1", "--dist", "2:1", "--steps", "20000", "--burn-in", "1000",
        "--seed", "9", "--no-timestamp", "--q-max", "8", "--box-size", "512",
        "--out", str(out),
    ] + extra
    assert main(args) == 0
    return out.read_bytes()


def test_sweep_determinism_and_threads(tmp_path):
    a = run_sweep(tmp_path, "a.csv", ["--threads", "1"])
    b = run_sweep(tmp_path, "b.csv", ["--threads", "1"])
    c = run_sweep(tmp_path, "c.csv", ["--threads", "4"])
    assert a == b
    assert a == c


def test_sweep_schema_and_rational_column(tmp_path):
    # the middle point of a symmetric bracket around pi/2 is classified 1/2
    out = tmp_path / "s.csv"
    lo, hi = math.pi / 2 - 0.2, math.pi / 2 + 0.2
    rc = main([
        "sweep-energy", "--k-min", str(lo), "--k-max", str(hi), "--k-count", "3",
        "--rho", "0.1", "--dist", "2:1", "--steps", "20000", "--seed", "3",
        "--no-timestamp", "--q-max", "8", "--box-size", "512", "--out", str(out),
    ])
    assert rc == 0
    lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    assert list(rows[0].keys()) == SWEEP_COLUMNS
    assert [r["q"] for r in rows] == ["", "2", ""]
    mid = rows[1]
    assert mid["gamma_hat_q_spectral"] != ""
    # the rational point's hat-q exponent differs from the neighbours' gamma_hat_inf
    spike = float(mid["gamma_hat_q_spectral"]) - float(rows[0]["gamma_hat_inf"])
    assert abs(spike) > 0.1


def test_sweep_rho_zero_rows(tmp_path):
    out = tmp_path / "z.csv"
    rc = main([
        "sweep-energy", "--k-min", "1.0", "--k-max", "2.0", "--k-count", "3",
        "--rho", "0", "--dist", "2:1", "--steps", "5000", "--seed", "1",
        "--no-timestamp", "--box-size", "256", "--out", str(out),
    ])
    assert rc == 0
    lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    for row in csv.DictReader(lines):
        assert float(row["gamma_mc"]) == 0.0
        assert float(row["gamma_mc_se"]) == 0.0
        assert float(row["dos_rot"]) == pytest.approx(float(row["k"]), abs=1e-12)


def test_config_echo_present(tmp_path):
    out = run_sweep(tmp_path, "echo.csv", ["--threads", "1"]).decode()
    header = [ln for ln in out.splitlines() if ln.startswith("# config:")]
    assert len(header) == 1
    cfg = json.loads(header[0].removeprefix("# config:"))
    assert cfg["command"] == "sweep-energy"
    assert cfg["seed"] == 9
    assert "threads" not in cfg  # execution context, not physics provenance


def test_json_format(tmp_path):
    out = tmp_path / "rows.json"
    rc = main([
        "sweep-density", "--k", "1.3", "--rho-list", "0.0,0.1", "--dist", "2:1",
        "--steps", "10000", "--seed", "4", "--no-timestamp", "--box-size", "256",
        "--format", "json", "--out", str(out),
    ])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["config"]["command"] == "sweep-density"
    assert len(payload["rows"]) == 2
    assert payload["rows"][0]["rho"] == 0.0
    assert payload["rows"][0]["gamma_mc"] == 0.0


def test_validation_errors_exit_1(capsys):
    assert main(["lyapunov", "--k", "5.0", "--dist", "2:1"]) == 1          # k outside band
    assert main(["lyapunov", "--dist", "2:1"]) == 1                        # no energy given
    assert main(["lyapunov", "--k", "1.0", "--E", "0.5", "--dist", "2:1"]) == 1
    assert main(["lyapunov", "--k", "1.0", "--dist", "2:-1"]) == 1         # bad weight
    assert main(["lyapunov", "--k-rational", "3/3", "--dist", "2:1"]) == 1
    assert main(["sweep-energy", "--k-min", "2.0", "--k-max", "1.0",
                 "--k-count", "3", "--dist", "2:1"]) == 1
    assert main(["nonsense-command"]) == 1
    capsys.readouterr()


def test_lyapunov_command_routes_rational(tmp_path, capsys):
    out = tmp_path / "row.csv"
    rc = main([
        "lyapunov", "--k-rational", "1/2", "--dist", "2:1", "--rho", "0.05",
        "--steps", "50000", "--seed", "2", "--no-timestamp", "--out", str(out),
    ])
    assert rc == 0
    text = capsys.readouterr().out
    assert "gamma_hat_q (spectral)" in text
    lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    row = next(csv.DictReader(lines))
    assert row["p"] == "1" and row["q"] == "2"
    assert row["gamma_hat_q_mc"] != ""


def test_anomaly_command(tmp_path, capsys):
    out = tmp_path / "anomaly.csv"
    rc = main(["anomaly", "--q-min", "2", "--q-max", "4", "--dist", "2:1",
               "--no-timestamp", "--out", str(out)])
    assert rc == 0
    lines = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    assert [r["q"] for r in rows] == ["2", "3", "4"]
    assert float(rows[0]["abs_diff"]) > 0.1  # the q=2 anomaly is large
    capsys.readouterr()


def test_dos_command(capsys):
    rc = main(["dos", "--k", "1.3", "--dist", "2:1", "--rho", "0.1",
               "--steps", "30000", "--seed", "5", "--box-size", "512"])
    assert rc == 0
    text = capsys.readouterr().out
    assert "rotation" in text and "eigencount" in text


def test_harmonics_command(tmp_path, capsys):
    out = tmp_path / "harm.json"
    rc = main(["harmonics", "--k-rational", "1/3", "--dist", "2:1", "--rho", "0.05",
               "--steps", "50000", "--seed", "6", "--m-max", "4", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["hat_identity"]["passed"] is True
    assert payload["printed_grid_identity"]["passed"] is False
    capsys.readouterr()


def test_verify_fast_exit_code_and_verdict(tmp_path, capsys, monkeypatch):
    # criteria 1 and 11 are honest failures (their stated anchors are
    # contradicted by the toolkit's independent routes), so the suite exit
    # code is 2 and the verdict names exactly those two criteria
    out = tmp_path / "verdict.json"
    monkeypatch.setattr(
        "dilute_anderson.acceptance.CRITERIA",
        tuple(fn for fn in cli.acceptance.CRITERIA
              if fn.__name__.split("_")[1] in ("01", "02", "03", "08", "11", "12")),
    )
    rc = main(["verify", "--suite", "fast", "--out", str(out)])
    assert rc == 2
    verdict = json.loads(out.read_text())
    failed = sorted(c["id"] for c in verdict["criteria"] if not c["passed"])
    assert failed == [1, 11]
    capsys.readouterr()


def test_verify_detects_tampered_constant(capsys, monkeypatch):
    # mutation probe: corrupt the closed form and the Fourier consistency
    # criterion must go red
    from dilute_anderson import acceptance, lyapunov
    from dilute_anderson.model import EstimateWithError
    from dilute_anderson.lyapunov import LyapunovResult

    real = lyapunov.gamma_hat_infinity

    def tampered(E, atoms):
        res = real(E, atoms)
        est = EstimateWithError(res.gamma.value + 1e-6, 0.0, 0, 0)
        return LyapunovResult(est, res.method, res.params)

    monkeypatch.setattr("dilute_anderson.lyapunov.gamma_hat_infinity", tampered)
    res = acceptance.criterion_02_fourier_consistency(acceptance.SuiteConfig(fast=True))
    assert not res.passed
    capsys.readouterr()

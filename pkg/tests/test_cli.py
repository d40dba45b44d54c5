"""Command-line behavior: formats, precedence, exit codes, determinism."""

import csv
import io
import json
import math

import pytest

from andersonlyap.cli import (
    EXIT_CONVERGENCE,
    EXIT_PARAMETER,
    EXIT_VERIFY,
    RunConfig,
    load_config_file,
    main,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestLyapunovCommand:
    def test_white_wave(self, capsys):
        code, out, _ = run_cli(capsys, "lyapunov", "--family", "white",
                               "--eq", "wave", "--format", "json")
        assert code == 0
        data = json.loads(out)
        assert abs(data["lambda2"] - 1.0 / math.sqrt(2.0)) < 1e-12

    def test_white_heat(self, capsys):
        code, out, _ = run_cli(capsys, "lyapunov", "--family", "white",
                               "--eq", "heat", "--format", "json")
        assert code == 0
        assert abs(json.loads(out)["lambda2"] - 0.25) < 1e-12

    def test_riesz_runs_eigensolver(self, capsys):
        code, out, _ = run_cli(capsys, "lyapunov", "--family", "riesz",
                               "--d", "1", "--alpha", "0.5", "--eq", "heat",
                               "--grid-points", "1024", "--format", "json")
        assert code == 0
        data = json.loads(out)
        assert data["consistency_gap"] < 1e-10
        assert "rho_solver" in data
        assert data["rho_solver"]["residual"] < 1e-8

    def test_rho_override_skips_solver(self, capsys):
        code, out, _ = run_cli(capsys, "lyapunov", "--family", "riesz",
                               "--d", "1", "--alpha", "0.5", "--eq", "wave",
                               "--rho", "1.5", "--format", "json")
        assert code == 0
        data = json.loads(out)
        assert "rho_solver" not in data
        assert data["rho"] == 1.5

    def test_fractional_needs_functional(self, capsys):
        code, _, err = run_cli(capsys, "lyapunov", "--family", "fractional",
                               "--H", "0.3", "--eq", "wave")
        assert code == EXIT_PARAMETER
        assert "e_gamma" in err

    def test_fractional_with_functional(self, capsys):
        code, out, _ = run_cli(capsys, "lyapunov", "--family", "fractional",
                               "--H", "0.3", "--eq", "wave",
                               "--e-gamma", "1.0", "--format", "json")
        assert code == 0
        H = 0.3
        assert json.loads(out)["lambda2"] == pytest.approx(
            2.0 ** ((3 * H - 2) / (2 * H + 1)), rel=1e-12
        )


class TestExitCodes:
    def test_parameter_error(self, capsys):
        code, _, err = run_cli(capsys, "lyapunov", "--family", "riesz",
                               "--d", "1", "--alpha", "1.5")
        assert code == EXIT_PARAMETER
        assert "alpha" in err

    def test_dalang_violation_named(self, capsys):
        code, _, err = run_cli(capsys, "lyapunov", "--family", "riesz",
                               "--d", "3", "--alpha", "2.5", "--eq", "heat")
        assert code == EXIT_PARAMETER
        assert "admissibility" in err

    def test_convergence_error(self, capsys):
        code, _, err = run_cli(capsys, "rho", "--family", "riesz", "--d", "1",
                               "--alpha", "0.5", "--grid-points", "256",
                               "--tol", "1e-15", "--max-iters", "3")
        assert code == EXIT_CONVERGENCE
        assert "residual" in err

    def test_verify_injection_fails(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--inject-wrong-exponent",
                               "--format", "json")
        assert code == EXIT_VERIFY
        data = json.loads(out)
        failed = [c["name"] for c in data["checks"] if not c["passed"]]
        assert failed == ["exponent_identity_residual"]


class TestChaosCommand:
    def test_white_heat_table(self, capsys):
        code, out, _ = run_cli(capsys, "chaos", "--family", "white", "--eq",
                               "heat", "--n", "3", "--samples", "50000",
                               "--seed", "3", "--format", "json")
        assert code == 0
        rows = json.loads(out)["rows"]
        assert rows[0]["n"] == 0 and rows[0]["mean"] == 1.0
        assert rows[0]["std_error"] == 0.0
        for row in rows[1:]:
            assert row["oracle"] == pytest.approx(0.5 ** row["n"])
            assert abs(row["z"]) <= 3.0

    def test_riesz_oracle_column(self, capsys):
        code, out, _ = run_cli(capsys, "chaos", "--family", "riesz", "--d",
                               "1", "--alpha", "0.5", "--eq", "heat", "--n",
                               "1", "--samples", "50000", "--seed", "3",
                               "--format", "json")
        assert code == 0
        row = json.loads(out)["rows"][1]
        assert row["oracle"] == pytest.approx(math.sqrt(math.pi), rel=1e-12)
        assert abs(row["z"]) <= 3.0

    def test_bm_method_requires_riesz(self, capsys):
        code, _, err = run_cli(capsys, "chaos", "--family", "white",
                               "--method", "bm", "--n", "1",
                               "--samples", "100")
        assert code == EXIT_PARAMETER
        assert "Riesz" in err

    def test_bm_method(self, capsys):
        code, out, _ = run_cli(capsys, "chaos", "--family", "riesz", "--d",
                               "1", "--alpha", "0.5", "--method", "bm",
                               "--n", "1", "--samples", "2000",
                               "--time-step", "0.002", "--seed", "3",
                               "--format", "json")
        assert code == 0
        row = json.loads(out)["rows"][0]
        assert row["n"] == 1
        assert abs(row["z"]) <= 4.0


class TestFormats:
    def test_csv_output(self, capsys):
        code, out, _ = run_cli(capsys, "chaos", "--family", "white", "--eq",
                               "heat", "--n", "2", "--samples", "20000",
                               "--seed", "3", "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert rows[0]["n"] == "0"
        assert float(rows[1]["mean"]) == pytest.approx(0.5)
        # '.' decimal separator, 17 significant digits for non-integers
        assert "," not in rows[1]["mean"]

    def test_json_17_digits(self, capsys):
        code, out, _ = run_cli(capsys, "lyapunov", "--family", "white",
                               "--eq", "wave", "--format", "json")
        assert code == 0
        assert "0.70710678118654757" in out

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, out, _ = run_cli(capsys, "lyapunov", "--family", "white",
                               "--eq", "heat", "--format", "json",
                               "--out", str(path))
        assert code == 0
        assert out == ""
        assert json.loads(path.read_text())["lambda2"] == 0.25


class TestConfigPrecedence:
    def test_config_file_used(self, capsys, tmp_path, monkeypatch):
        cfg = tmp_path / "anderson.cfg"
        cfg.write_text("family = white\neq = heat\nformat = json\n")
        monkeypatch.setenv("ANDERSON_CONFIG", str(cfg))
        code, out, _ = run_cli(capsys, "lyapunov")
        assert code == 0
        assert json.loads(out)["lambda2"] == 0.25

    def test_flag_overrides_config(self, capsys, tmp_path, monkeypatch):
        cfg = tmp_path / "anderson.cfg"
        cfg.write_text("family = white\neq = heat\nformat = json\n")
        monkeypatch.setenv("ANDERSON_CONFIG", str(cfg))
        code, out, _ = run_cli(capsys, "lyapunov", "--eq", "wave")
        assert code == 0
        assert abs(json.loads(out)["lambda2"] - 2.0 ** -0.5) < 1e-12

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "anderson.cfg"
        cfg.write_text("flux_capacitor = 1\n")
        with pytest.raises(Exception):
            load_config_file(str(cfg))

    def test_run_config_round_trip(self):
        cfg = RunConfig(command="chaos", family="riesz", d=2, alpha=1.3,
                        seed=99, t=2.5)
        assert RunConfig.from_dict(cfg.to_dict()) == cfg


class TestVerifyDeterminism:
    def test_byte_identical_runs(self, capsys, tmp_path):
        p1, p2 = tmp_path / "v1.json", tmp_path / "v2.json"
        for p in (p1, p2):
            code, _, _ = run_cli(capsys, "verify", "--seed", "11",
                                 "--threads", "2", "--format", "json",
                                 "--out", str(p))
            assert code == 0
        assert p1.read_bytes() == p2.read_bytes()


class TestMlCommand:
    def test_point_value(self, capsys):
        code, out, _ = run_cli(capsys, "ml", "--a", "1.0", "--x", "1.0",
                               "--format", "json")
        assert code == 0
        assert json.loads(out)["rows"][0]["value"] == pytest.approx(math.e)

    def test_growth(self, capsys):
        code, out, _ = run_cli(capsys, "ml", "--a", "1.0", "--growth-c",
                               "2.0", "--t", "100", "--format", "json")
        assert code == 0
        assert json.loads(out)["rows"][0]["growth_rate"] == pytest.approx(2.0)

    def test_needs_argument(self, capsys):
        code, _, err = run_cli(capsys, "ml", "--a", "1.0")
        assert code == EXIT_PARAMETER

"""End-to-end tests of the command-line interface (in-process, plus one
subprocess check of the installed entry point)."""

import json
import math
import re
import shutil
import subprocess

import numpy as np
import pytest

import gmbayes.cli
from gmbayes import SWEEP_CSV_HEADER, parse_sweep_csv
from gmbayes.cli import main

SCALAR_GAUSSIAN = {
    "model": {
        "H": [[1.0]],
        "x": [{"weight": 1.0, "mean": [0.0], "covariance": [[1.0]]}],
        "noise": [{"weight": 1.0, "mean": [0.0], "covariance": [[1.0]]}],
    }
}

FAR_SEPARATED = {
    "model": {
        "H": [[1.0]],
        "x": [
            {"weight": 0.5, "mean": [-50.0], "covariance": [[1.0]]},
            {"weight": 0.5, "mean": [50.0], "covariance": [[1.0]]},
        ],
        "noise": [{"weight": 1.0, "mean": [0.0], "covariance": [[1.0]]}],
    }
}


def write_config(tmp_path, doc, name="model.config"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestValidate:
    def test_packaged_figure1_by_name(self, capsys):
        assert main(["validate", "--config", "figure1.config"]) == 0
        out = capsys.readouterr().out
        assert "signal dimension d = 5" in out
        assert "observation dimension m = 5" in out
        assert "signal components |K| = 4" in out
        assert "noise components |L| = 1" in out
        assert "sweep: 61 points from -10 to 50 dB" in out
        assert out.rstrip().endswith("valid")

    def test_wide_observation_matrix(self, tmp_path, capsys):
        doc = {
            "model": {
                "H": [[1.0 if j == i else 0.0 for j in range(5)] for i in range(4)],
                "x": [{"weight": 1.0, "mean": [0.0] * 5, "covariance": np.eye(5).tolist()}],
                "noise": [{"weight": 1.0, "mean": [0.0] * 4, "covariance": np.eye(4).tolist()}],
            }
        }
        assert main(["validate", "--config", write_config(tmp_path, doc)]) == 0
        out = capsys.readouterr().out
        assert "observation dimension m = 4" in out
        assert "signal dimension d = 5" in out

    def test_invalid_weights_exit_1(self, tmp_path, capsys):
        doc = json.loads(json.dumps(SCALAR_GAUSSIAN))
        doc["model"]["x"][0]["weight"] = 0.9
        assert main(["validate", "--config", write_config(tmp_path, doc)]) == 1
        err = capsys.readouterr().err
        assert "model.x" in err and "weights sum" in err

    def test_missing_config_exit_1(self, capsys):
        assert main(["validate", "--config", "/no/such/file.config"]) == 1
        assert "config file not found" in capsys.readouterr().err


class TestEstimate:
    def test_scalar_gaussian(self, tmp_path, capsys):
        config = write_config(tmp_path, SCALAR_GAUSSIAN)
        assert main(["estimate", "--config", config, "--y", "2.0"]) == 0
        out = capsys.readouterr().out
        assert "y = [2]" in out
        assert "xhat = [1]" in out
        assert "alpha total = 1.000000000000" in out
        assert "Tr(C_x|y) = 0.5" in out

    def test_far_separated_responsibilities(self, tmp_path, capsys):
        config = write_config(tmp_path, FAR_SEPARATED)
        assert main(["estimate", "--config", config, "--y", "50.0"]) == 0
        out = capsys.readouterr().out
        assert "k=0: 0.000000000000" in out
        assert "k=1: 1.000000000000" in out

    def test_y_from_file(self, tmp_path, capsys):
        config = write_config(tmp_path, SCALAR_GAUSSIAN)
        y_path = tmp_path / "y.txt"
        y_path.write_text("2.0\n")
        assert main(["estimate", "--config", config, "--y", f"@{y_path}"]) == 0
        assert "xhat = [1]" in capsys.readouterr().out

    def test_figure1_alpha_table_shape(self, capsys):
        argv = ["estimate", "--config", "figure1.config",
                "--y", "35.0, -20.0, -6.0, 24.0, 39.0"]
        assert main(argv) == 0
        out = capsys.readouterr().out
        assert all(f"k={k}:" in out for k in range(4))
        # y sits on top of the first signal component
        match = re.search(r"k=0: (\d\.\d+)", out)
        assert float(match.group(1)) > 0.999

    def test_dimension_mismatch_exit_1(self, tmp_path, capsys):
        config = write_config(tmp_path, SCALAR_GAUSSIAN)
        assert main(["estimate", "--config", config, "--y", "1.0, 2.0"]) == 1
        assert "dimension" in capsys.readouterr().err

    def test_empty_y_exit_1(self, tmp_path, capsys):
        config = write_config(tmp_path, SCALAR_GAUSSIAN)
        assert main(["estimate", "--config", config, "--y", " "]) == 1
        assert "empty observation vector" in capsys.readouterr().err


class TestSweep:
    def run_sweep_cli(self, tmp_path, name, extra=()):
        out = tmp_path / name
        argv = ["sweep", "--config", "oracle1d.config", "--out", str(out),
                "--trials", "400", *extra]
        code = main(argv)
        return code, out

    def test_writes_csv_with_header_and_rows(self, tmp_path, capsys):
        code, out = self.run_sweep_cli(tmp_path, "a.csv")
        assert code == 0
        assert f"wrote 5 points to {out}" in capsys.readouterr().out
        text = out.read_text()
        assert SWEEP_CSV_HEADER in text
        assert len(parse_sweep_csv(text)) == 5

    def test_runs_are_byte_identical(self, tmp_path):
        _, a = self.run_sweep_cli(tmp_path, "a.csv")
        _, b = self.run_sweep_cli(tmp_path, "b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_parallel_matches_serial_bytes(self, tmp_path):
        _, a = self.run_sweep_cli(tmp_path, "serial.csv")
        _, b = self.run_sweep_cli(tmp_path, "parallel.csv", extra=["--workers", "3"])
        assert a.read_bytes() == b.read_bytes()

    def test_rows_satisfy_sandwich(self, tmp_path):
        _, out = self.run_sweep_cli(tmp_path, "a.csv", extra=["--trials", "20000"])
        for row in parse_sweep_csv(out.read_text()):
            mse = 10.0 ** (row.mse_mmse_db / 10.0)
            lower = 10.0 ** (row.lower_db / 10.0)
            upper = 10.0 ** (row.upper_db / 10.0)
            assert lower - 3 * row.stderr_mmse <= mse <= upper + 3 * row.stderr_mmse

    def test_svg_output(self, tmp_path, capsys):
        svg = tmp_path / "chart.svg"
        code, _ = self.run_sweep_cli(tmp_path, "a.csv", extra=["--svg", str(svg)])
        assert code == 0
        assert f"wrote chart to {svg}" in capsys.readouterr().out
        assert svg.read_text().startswith("<svg")

    def test_estimators_none_gives_bounds_only(self, tmp_path):
        _, out = self.run_sweep_cli(tmp_path, "a.csv", extra=["--estimators", "none"])
        rows = parse_sweep_csv(out.read_text())
        assert all(r.mse_mmse_db is None and r.mse_lmmse_db is None for r in rows)
        assert all(r.lower_db is not None for r in rows)

    def test_bad_estimator_exit_1(self, tmp_path, capsys):
        code, _ = self.run_sweep_cli(tmp_path, "a.csv", extra=["--estimators", "map"])
        assert code == 1
        assert "unknown estimator" in capsys.readouterr().err

    def test_failed_point_reported_and_exit_1(self, tmp_path, capsys):
        doc = json.loads(json.dumps(SCALAR_GAUSSIAN))
        doc["sweep"] = {
            "snr_db_start": -20000.0, "snr_db_stop": -20000.0, "snr_db_step": 1.0,
            "trials": 10, "seed": 0,
        }
        out = tmp_path / "fail.csv"
        code = main(["sweep", "--config", write_config(tmp_path, doc), "--out", str(out)])
        assert code == 1
        captured = capsys.readouterr()
        assert "failed" in captured.err
        # the CSV is still written, with the failure recorded as a comment
        assert "# point at -20000 dB failed" in out.read_text()

    def test_unwritable_output_exit_2(self, tmp_path, capsys):
        out = tmp_path / "missing-dir" / "a.csv"
        code = main(["sweep", "--config", "oracle1d.config", "--out", str(out),
                     "--trials", "10"])
        assert code == 2
        assert "error" in capsys.readouterr().err


class TestOracleCheck:
    def test_pass_on_oracle1d(self, capsys):
        code = main(["oracle-check", "--config", "oracle1d.config",
                     "--grid-points", "2001"])
        assert code == 0
        out = capsys.readouterr().out
        assert "PASS" in out
        assert "oracle check on 101 observation values" in out

    def test_single_gaussian_deviation_tiny(self, tmp_path, capsys):
        config = write_config(tmp_path, SCALAR_GAUSSIAN)
        assert main(["oracle-check", "--config", config, "--grid-points", "2001"]) == 0
        out = capsys.readouterr().out
        deviation = float(
            re.search(r"max \|analytic - quadrature posterior mean\| = (\S+)", out).group(1)
        )
        assert deviation < 1e-8

    def test_corrupted_gain_negative_control(self, tmp_path, capsys, monkeypatch):
        class CorruptedEstimator(gmbayes.cli.PrecomputedEstimator):
            # a wrong gain shifts every estimate; the oracle must catch it
            def estimate(self, y):
                return super().estimate(y) + 1e-3

        monkeypatch.setattr(gmbayes.cli, "PrecomputedEstimator", CorruptedEstimator)
        config = write_config(tmp_path, SCALAR_GAUSSIAN)
        assert main(["oracle-check", "--config", config, "--grid-points", "1001"]) == 1
        out = capsys.readouterr().out
        assert "FAIL" in out
        deviation = float(
            re.search(r"max \|analytic - quadrature posterior mean\| = (\S+)", out).group(1)
        )
        assert deviation == pytest.approx(1e-3, rel=1e-3)

    def test_multidimensional_model_rejected(self, capsys):
        assert main(["oracle-check", "--config", "figure1.config"]) == 1
        assert "1-D models only" in capsys.readouterr().err

    def test_bad_grid_parameters_exit_1(self, capsys):
        code = main(["oracle-check", "--config", "oracle1d.config",
                     "--grid-points", "2000"])
        assert code == 1
        assert "odd" in capsys.readouterr().err


class TestEntryPoint:
    def test_installed_console_script(self):
        exe = shutil.which("gmbayes")
        assert exe is not None, "gmbayes console script not on PATH"
        result = subprocess.run(
            [exe, "validate", "--config", "figure1.config"],
            capture_output=True, text=True, timeout=60,
        )
        assert result.returncode == 0
        assert "valid" in result.stdout

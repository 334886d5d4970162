"""Command-line interface: subcommands, outputs, exit codes."""

import json
import os

import pytest
from click.testing import CliRunner

from airvote import cli
from airvote.harness import VerifyPoint


@pytest.fixture
def runner():
    return CliRunner()


def make_config(tmp_path, **overrides):
    data = {
        "seed": 3,
        "K": 4,
        "M": 8,
        "N": 5,
        "q": 6,
        "snr_db": 10.0,
        "mode": "awgn",
        "g_th": 0.0,
        "gamma": 2.0,
        "sigma_delta": 0.0,
        "landscape": "quadratic",
        "modulation": "qam4",
        "output_dir": str(tmp_path / "out"),
    }
    data.update(overrides)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    return str(path)


class TestRunCommand:
    def test_writes_csv_and_info(self, runner, tmp_path):
        cfg = make_config(tmp_path)
        result = runner.invoke(cli.main, ["run", "--config", cfg])
        assert result.exit_code == 0, result.output
        out = tmp_path / "out"
        assert (out / "rounds_awgn.csv").exists()
        info = json.loads((out / "run_info_awgn.json").read_text())
        assert info["N"] == 5 and info["scenario"] == "awgn"

    def test_seed_and_out_overrides(self, runner, tmp_path):
        cfg = make_config(tmp_path)
        alt = tmp_path / "elsewhere"
        result = runner.invoke(
            cli.main, ["run", "--config", cfg, "--seed", "99", "--out", str(alt)]
        )
        assert result.exit_code == 0, result.output
        info = json.loads((alt / "run_info_awgn.json").read_text())
        assert info["seed"] == 99

    def test_bad_config_exits_2(self, runner, tmp_path):
        cfg = make_config(tmp_path, mode="mystery")
        result = runner.invoke(cli.main, ["run", "--config", cfg])
        assert result.exit_code == 2
        assert "config error" in result.output

    def test_missing_config_exits_2(self, runner):
        result = runner.invoke(cli.main, ["run", "--config", "/no/such.json"])
        assert result.exit_code == 2

    def test_vacuous_bound_exits_3(self, runner, tmp_path):
        cfg = make_config(tmp_path, K=1, snr_db=-10.0)
        result = runner.invoke(cli.main, ["run", "--config", cfg])
        assert result.exit_code == 3
        assert "vacuous" in result.output


class TestVerifyCommand:
    def test_small_grid_passes(self, runner, tmp_path):
        cfg = make_config(
            tmp_path,
            verify={
                "scenarios": ["awgn"],
                "k": [2, 8],
                "s": [1.0],
                "rho_db": [10.0],
                "trials": 10000,
            },
        )
        result = runner.invoke(cli.main, ["verify-perr", "--config", cfg])
        assert result.exit_code == 0, result.output
        csv_path = tmp_path / "out" / "verify_perr.csv"
        assert csv_path.exists()
        assert "0 failed" in result.output

    def test_verification_failure_exits_4(self, runner, tmp_path, monkeypatch):
        fake = [
            VerifyPoint(
                scenario="awgn",
                k=2,
                s=1.0,
                rho_db=10.0,
                alpha=1.0,
                sigma_delta=0.0,
                trials=10_000,
                p_emp=0.4,
                p_bound=0.1,
                margin=-0.3,
                passed=False,
            )
        ]
        monkeypatch.setattr(cli, "verify_perr", lambda cfg, threads=1: fake)
        cfg = make_config(tmp_path)
        result = runner.invoke(cli.main, ["verify-perr", "--config", cfg])
        assert result.exit_code == 4
        assert "worst violation" in result.output


class TestSweepCommand:
    def test_writes_rows(self, runner, tmp_path):
        cfg = make_config(
            tmp_path,
            sweep={
                "scenarios": ["awgn"],
                "k": [10, 100],
                "rho_db": [10.0],
                "constants": {
                    "l1": 1.0,
                    "sigma1": 1.0,
                    "f0": 1.0,
                    "fstar": 0.0,
                    "gamma": 1.0,
                    "n": 100,
                },
            },
        )
        result = runner.invoke(cli.main, ["sweep-bounds", "--config", cfg])
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "out" / "sweep_bounds.csv").read_text().strip().split("\n")
        assert len(lines) == 3


class TestEmitPlotsCommand:
    def test_requires_out_or_config(self, runner):
        result = runner.invoke(cli.main, ["emit-plots"])
        assert result.exit_code == 2

    def test_empty_directory_exits_2_listing_files(self, runner, tmp_path):
        result = runner.invoke(cli.main, ["emit-plots", "--out", str(tmp_path)])
        assert result.exit_code == 2
        assert "verify_perr.csv" in result.output

    def test_emits_for_present_results(self, runner, tmp_path):
        cfg = make_config(
            tmp_path,
            verify={"scenarios": ["awgn"], "k": [2], "s": [1.0], "rho_db": [10.0], "trials": 10000},
        )
        assert runner.invoke(cli.main, ["verify-perr", "--config", cfg]).exit_code == 0
        result = runner.invoke(
            cli.main, ["emit-plots", "--out", str(tmp_path / "out")]
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "out" / "bound_vs_empirical.gp").exists()

    def test_out_from_config(self, runner, tmp_path):
        cfg = make_config(
            tmp_path,
            verify={"scenarios": ["awgn"], "k": [2], "s": [1.0], "rho_db": [10.0], "trials": 10000},
        )
        assert runner.invoke(cli.main, ["verify-perr", "--config", cfg]).exit_code == 0
        result = runner.invoke(cli.main, ["emit-plots", "--config", cfg])
        assert result.exit_code == 0, result.output


class TestByteDeterminism:
    def test_run_reproduces_identical_bytes(self, runner, tmp_path):
        cfg = make_config(tmp_path, mode="fading_perfect_csi", g_th=0.3)
        out = tmp_path / "out"
        blobs = []
        for threads in ("1", "4", "1"):
            result = runner.invoke(
                cli.main, ["run", "--config", cfg, "--threads", threads]
            )
            assert result.exit_code == 0, result.output
            blobs.append((out / "rounds_fading_perfect_csi.csv").read_bytes())
        assert blobs[0] == blobs[1] == blobs[2]

    def test_verify_reproduces_identical_bytes(self, runner, tmp_path):
        cfg = make_config(
            tmp_path,
            verify={
                "scenarios": ["fading"],
                "k": [3],
                "s": [1.0],
                "rho_db": [0.0],
                "alpha": [0.5],
                "trials": 10000,
            },
        )
        out = tmp_path / "out"
        blobs = []
        for threads in ("1", "4"):
            result = runner.invoke(
                cli.main, ["verify-perr", "--config", cfg, "--threads", threads]
            )
            assert result.exit_code == 0, result.output
            blobs.append((out / "verify_perr.csv").read_bytes())
        assert blobs[0] == blobs[1]

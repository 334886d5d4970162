"""Config handling, the training runner, verification grid, sweeps, plots."""

import json
import math
import os

import numpy as np
import pytest

from airvote.analysis import LandscapeConstants, ScenarioParams, conv_bound
from airvote.core import l1_norm, sign_quantize
from airvote.errors import ConfigError, VacuousBoundError
from airvote.harness import (
    RunConfig,
    SweepSpec,
    VerifySpec,
    build_problem,
    channel_setup,
    config_from_dict,
    emit_plots,
    load_config,
    run_feel,
    sweep_bounds,
    verify_perr,
    write_rounds_csv,
    write_sweep_csv,
    write_verify_csv,
)
from airvote.learn import (
    DeviceDataset,
    ModelState,
    apply_update,
    local_gradient,
    theorem_hyperparams,
)
from airvote.rng import BATCH, stream


def write_config(tmp_path, name="cfg.json", **overrides):
    data = {
        "seed": 3,
        "K": 4,
        "M": 8,
        "N": 6,
        "q": 5,
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
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


class TestConfig:
    def test_round_trip(self, tmp_path):
        cfg = load_config(write_config(tmp_path))
        assert (cfg.k, cfg.m, cfg.n, cfg.q) == (4, 8, 6, 5)
        assert cfg.mode == "awgn"

    def test_unknown_key_is_hard_error(self, tmp_path):
        path = write_config(tmp_path, krounds=7)
        with pytest.raises(ConfigError, match="unknown config keys.*krounds"):
            load_config(path)

    def test_unknown_verify_key_is_hard_error(self):
        with pytest.raises(ConfigError, match="verify"):
            config_from_dict({"verify": {"trails": 1000}})

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="not found"):
            load_config("/nonexistent/cfg.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="JSON"):
            load_config(str(path))

    def test_bad_mode(self, tmp_path):
        with pytest.raises(ConfigError, match="mode"):
            load_config(write_config(tmp_path, mode="rayleigh"))

    def test_sigma_delta_requires_imperfect_mode(self, tmp_path):
        with pytest.raises(ConfigError, match="sigma_delta"):
            load_config(write_config(tmp_path, sigma_delta=0.1))

    def test_cutoff_forbidden_without_fading(self, tmp_path):
        with pytest.raises(ConfigError, match="truncation"):
            load_config(write_config(tmp_path, g_th=0.5))

    def test_missing_dataset_file(self, tmp_path):
        with pytest.raises(ConfigError, match="dataset"):
            load_config(
                write_config(
                    tmp_path, landscape="logistic", q=65, dataset_path="/none.txt"
                )
            )

    def test_verify_section_parsed(self, tmp_path):
        path = write_config(
            tmp_path, verify={"scenarios": ["awgn"], "trials": 20000, "k": [2]}
        )
        cfg = load_config(path)
        assert cfg.verify.scenarios == ("awgn",)
        assert cfg.verify.trials == 20000
        # untouched defaults survive
        assert cfg.verify.s == VerifySpec().s

    def test_snr_conversion(self, tmp_path):
        cfg = load_config(write_config(tmp_path, snr_db=10.0))
        policy, sigma_z, _, _ = channel_setup(cfg)
        assert policy.rho0 / sigma_z**2 == pytest.approx(10.0, rel=1e-12)


class TestRunFeel:
    def test_deterministic_across_runs_and_threads(self):
        cfg = RunConfig(seed=11, k=6, m=4, n=8, q=6, mode="fading_perfect_csi", g_th=0.3)
        r1, _, _ = run_feel(cfg, threads=1)
        r2, _, _ = run_feel(cfg, threads=1)
        r4, _, _ = run_feel(cfg, threads=4)
        assert r1 == r2 == r4

    def test_single_device_noiseless_is_plain_sign_descent(self):
        cfg = RunConfig(
            seed=5, k=1, m=8, n=25, q=6, mode="noiseless", gamma=5.0, modulation="bpsk"
        )
        records, _, info = run_feel(cfg)
        problem = build_problem(cfg)
        hp = theorem_hyperparams(
            problem.landscape.smoothness, cfg.n, cfg.gamma, len(problem.device_features[0])
        )
        assert hp.eta == info["eta"]
        device = DeviceDataset(
            problem.device_features[0], problem.device_labels[0], hp.n_b
        )
        model = ModelState(w=problem.w0)
        for rnd in range(cfg.n):
            g_ref = l1_norm(problem.landscape.full_gradient(model.w))
            assert records[rnd].g_l1 == g_ref
            grad = local_gradient(
                problem.landscape, model, device, stream(cfg.seed, BATCH, rnd, 0)
            )
            model = apply_update(model, sign_quantize(grad), hp.eta)

    def test_round_indices_and_running_average(self):
        cfg = RunConfig(seed=2, k=3, m=4, n=7, q=4)
        records, _, _ = run_feel(cfg)
        assert [r.round for r in records] == list(range(7))
        partial = [r.g_l1 for r in records]
        for i, rec in enumerate(records):
            assert rec.g_l1_timeavg == pytest.approx(np.mean(partial[: i + 1]))

    def test_quadratic_has_no_accuracy_and_logistic_does(self):
        cfg = RunConfig(seed=2, k=3, m=4, n=3, q=4)
        records, _, _ = run_feel(cfg)
        assert all(r.accuracy is None for r in records)
        cfg = RunConfig(seed=2, k=3, m=40, n=3, q=65, landscape="logistic")
        records, _, _ = run_feel(cfg)
        assert all(0.0 <= r.accuracy <= 1.0 for r in records)

    def test_truncation_fraction_zero_on_static_channel(self):
        cfg = RunConfig(seed=4, k=3, m=4, n=3, q=4, mode="awgn")
        records, _, _ = run_feel(cfg)
        assert all(r.trunc_frac == 0.0 for r in records)

    def test_vacuous_bound_raised_before_rounds(self):
        cfg = RunConfig(seed=1, k=1, m=4, n=5, q=4, snr_db=-10.0, mode="awgn")
        with pytest.raises(VacuousBoundError):
            run_feel(cfg)

    def test_logistic_q_mismatch(self):
        cfg = RunConfig(seed=1, k=2, m=8, n=2, q=10, landscape="logistic")
        with pytest.raises(ConfigError, match="parameters"):
            run_feel(cfg)

    def test_bound_report_matches_direct_evaluation(self):
        cfg = RunConfig(seed=9, k=50, m=8, n=12, q=6, mode="awgn")
        _, report, info = run_feel(cfg)
        params = ScenarioParams(k=50, rho=10.0)
        constants = LandscapeConstants(
            l1=info["l1"],
            sigma1=info["sigma1"],
            f0=info["f0"],
            fstar=info["fstar"],
            gamma=info["gamma_effective"],
            n=cfg.n,
        )
        direct = conv_bound(params, constants, "awgn")
        assert report.a == direct.a and report.b == direct.b and report.rhs == direct.rhs


class TestVerifyPerr:
    def test_grid_size_and_pass_fields(self):
        spec = VerifySpec(
            scenarios=("awgn", "fading"),
            k=(2, 4),
            s=(1.0,),
            rho_db=(10.0,),
            alpha=(0.5,),
            sigma_delta=(0.0,),
            trials=10_000,
        )
        cfg = RunConfig(seed=0, verify=spec)
        points = verify_perr(cfg)
        assert len(points) == 2 + 2  # awgn: K grid; fading: K x alpha grid
        for p in points:
            assert 0.0 <= p.p_emp <= 1.0
            assert p.p_bound <= 0.5
            assert p.passed

    def test_thread_invariance(self):
        spec = VerifySpec(
            scenarios=("imperfect",),
            k=(3,),
            s=(0.5,),
            rho_db=(0.0,),
            alpha=(0.9,),
            sigma_delta=(0.05,),
            trials=20_000,
        )
        cfg = RunConfig(seed=7, verify=spec)
        a = verify_perr(cfg, threads=1)
        b = verify_perr(cfg, threads=4)
        assert a == b

    def test_forced_truncation_limit_is_coin_flip(self):
        # alpha -> 0: nearly every element loses all devices and the
        # decision degenerates to a fair guess.
        spec = VerifySpec(
            scenarios=("fading",),
            k=(3,),
            s=(2.0,),
            rho_db=(10.0,),
            alpha=(0.01,),
            sigma_delta=(0.0,),
            trials=50_000,
        )
        points = verify_perr(RunConfig(seed=1, verify=spec))
        assert points[0].p_emp == pytest.approx(0.5, abs=0.02)
        assert points[0].passed

    def test_zero_csi_error_reduces_to_perfect_csi(self):
        base = dict(k=(5,), s=(1.0,), rho_db=(10.0,), alpha=(0.7,), trials=50_000)
        fading = verify_perr(
            RunConfig(seed=3, verify=VerifySpec(scenarios=("fading",), sigma_delta=(0.0,), **base))
        )[0]
        imperfect = verify_perr(
            RunConfig(
                seed=3, verify=VerifySpec(scenarios=("imperfect",), sigma_delta=(0.0,), **base)
            )
        )[0]
        assert imperfect.p_bound == fading.p_bound
        band = 6.0 * math.sqrt(0.25 / 50_000)
        assert abs(imperfect.p_emp - fading.p_emp) < band

    def test_too_few_trials_rejected(self):
        cfg = RunConfig(verify=VerifySpec(trials=5000))
        with pytest.raises(ConfigError, match="10\\^4"):
            verify_perr(cfg)


class TestSweepBounds:
    def test_row_count_is_grid_size(self):
        spec = SweepSpec(
            scenarios=("awgn", "fading", "imperfect"),
            k=(10, 100),
            rho_db=(0.0, 10.0),
            alpha=(0.5, 0.9),
            sigma_delta=(0.01, 0.02),
            constants={"l1": 1.0, "sigma1": 1.0, "f0": 1.0, "fstar": 0.0, "gamma": 1.0, "n": 100},
        )
        rows = sweep_bounds(RunConfig(sweep=spec))
        # awgn: 2*2; fading: 2*2*2; imperfect: 2*2*2*2
        assert len(rows) == 4 + 8 + 16

    def test_single_point_equals_direct_call(self):
        constants = {"l1": 2.0, "sigma1": 3.0, "f0": 1.5, "fstar": 0.0, "gamma": 1.0, "n": 64}
        spec = SweepSpec(
            scenarios=("fading",),
            k=(40,),
            rho_db=(10.0,),
            alpha=(0.8,),
            sigma_delta=(0.0,),
            constants=constants,
        )
        row = sweep_bounds(RunConfig(sweep=spec))[0]
        direct = conv_bound(
            ScenarioParams(k=40, rho=10.0, alpha=0.8, g_th=-math.log(0.8)),
            LandscapeConstants(**constants),
            "fading",
        )
        assert (row.a, row.b, row.rhs) == (direct.a, direct.b, direct.rhs)

    def test_monotone_toward_noiseless_in_devices(self):
        spec = SweepSpec(
            scenarios=("awgn",),
            k=tuple(int(x) for x in np.logspace(1, 3, 12)),
            rho_db=(10.0,),
            constants={"l1": 1.0, "sigma1": 1.0, "f0": 1.0, "fstar": 0.0, "gamma": 1.0, "n": 100},
        )
        rows = sweep_bounds(RunConfig(sweep=spec))
        a_vals = [r.a for r in rows]
        b_vals = [r.b for r in rows]
        assert all(x > y for x, y in zip(a_vals, a_vals[1:]))
        assert all(x > y for x, y in zip(b_vals, b_vals[1:]))
        assert a_vals[-1] < 1.001 and b_vals[-1] < 0.01

    def test_vacuous_points_flagged_not_dropped(self):
        spec = SweepSpec(
            scenarios=("awgn",),
            k=(1,),
            rho_db=(-20.0, 20.0),
            constants={"l1": 1.0, "sigma1": 1.0, "f0": 1.0, "fstar": 0.0, "gamma": 1.0, "n": 100},
        )
        rows = sweep_bounds(RunConfig(sweep=spec))
        assert len(rows) == 2
        assert math.isnan(rows[0].a) and not math.isnan(rows[1].a)

    def test_constants_derived_from_landscape_when_absent(self):
        cfg = RunConfig(seed=4, k=3, m=4, n=6, q=4, sweep=SweepSpec(scenarios=("awgn",), k=(10,), rho_db=(10.0,)))
        rows = sweep_bounds(cfg)
        assert len(rows) == 1 and rows[0].rhs > 0.0


class TestSerialization:
    def test_rounds_csv_layout(self, tmp_path):
        cfg = RunConfig(seed=2, k=3, m=4, n=3, q=4)
        records, _, _ = run_feel(cfg)
        path = tmp_path / "rounds_awgn.csv"
        write_rounds_csv(path, records)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "round,g_l1,g_l1_timeavg,accuracy,ber_emp,trunc_frac"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "0" and first[3] == ""  # quadratic: accuracy empty

    def test_verify_csv_layout(self, tmp_path):
        spec = VerifySpec(scenarios=("awgn",), k=(2,), s=(1.0,), rho_db=(10.0,), trials=10_000)
        points = verify_perr(RunConfig(seed=0, verify=spec))
        path = tmp_path / "verify_perr.csv"
        write_verify_csv(path, points)
        lines = path.read_text().strip().split("\n")
        assert lines[0].startswith("scenario,K,S,rho_db")
        assert lines[1].split(",")[0] == "awgn"
        assert lines[1].split(",")[-1] == "1"

    def test_sweep_csv_nan_flag(self, tmp_path):
        spec = SweepSpec(
            scenarios=("awgn",),
            k=(1,),
            rho_db=(-20.0,),
            constants={"l1": 1.0, "sigma1": 1.0, "f0": 1.0, "fstar": 0.0, "gamma": 1.0, "n": 100},
        )
        rows = sweep_bounds(RunConfig(sweep=spec))
        path = tmp_path / "sweep_bounds.csv"
        write_sweep_csv(path, rows)
        assert "nan" in path.read_text()


class TestEmitPlots:
    def _touch(self, directory, name):
        (directory / name).write_text("header\n")

    def test_missing_everything_raises_with_expected_list(self, tmp_path):
        with pytest.raises(ConfigError) as err:
            emit_plots(str(tmp_path))
        for expected in ("rounds_awgn.csv", "accuracy_vs_k.csv", "verify_perr.csv"):
            assert expected in str(err.value)

    def test_partial_inputs_emit_partial_scripts(self, tmp_path):
        self._touch(tmp_path, "verify_perr.csv")
        written, missing = emit_plots(str(tmp_path))
        assert [os.path.basename(p) for p in written] == ["bound_vs_empirical.gp"]
        assert "rounds_awgn.csv" in missing

    def test_full_inputs_emit_all_scripts(self, tmp_path):
        for name in (
            "rounds_awgn.csv",
            "rounds_fading_perfect_csi.csv",
            "rounds_fading_imperfect_csi.csv",
            "accuracy_vs_k.csv",
            "verify_perr.csv",
        ):
            self._touch(tmp_path, name)
        written, missing = emit_plots(str(tmp_path))
        assert len(written) == 3 and not missing
        text = (tmp_path / "accuracy_vs_round.gp").read_text()
        assert "rounds_fading_imperfect_csi.csv" in text
        assert "set term pngcairo" in text

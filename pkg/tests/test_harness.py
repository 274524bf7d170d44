import csv
import json

import numpy as np
import pytest

from psmaqb.cli import main
from psmaqb.exceptions import ConfigError
from psmaqb.harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    emit,
    fit_trace,
    read_trace_csv,
    run_episode,
    run_experiment,
)

SMALL = dict(T=2000, k=5, runs=4, master_seed=3)


@pytest.fixture(scope="module")
def small_trace():
    cfg = ExperimentConfig(**SMALL)
    return cfg, run_experiment(cfg)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(T=70, k=10)  # fewer than two batches of 40
    ExperimentConfig(T=80, k=10)
    with pytest.raises(ConfigError):
        ExperimentConfig(runs=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(policy="greedy")
    with pytest.raises(ConfigError):
        ExperimentConfig(lambda0=1.0)
    with pytest.raises(ConfigError):
        ExperimentConfig(policy="etc", alpha=1.5)
    with pytest.raises(ConfigError):
        ExperimentConfig(env="fixed:1,0")
    with pytest.raises(ConfigError):
        ExperimentConfig(env="fixed:0,0,0")
    with pytest.raises(ConfigError):
        ExperimentConfig(env="sometimes")


def test_fixed_environment_is_normalized():
    cfg = ExperimentConfig(env="fixed:0,3,4", T=200, k=5, runs=2)
    assert np.allclose(cfg.fixed_theta, [0.0, 0.6, 0.8])
    a, b = run_episode(cfg, 0), run_episode(cfg, 1)
    assert np.array_equal(a.theta, b.theta)
    assert a.env_seed != b.env_seed


def test_checkpoint_grid():
    cp = ExperimentConfig(T=40_000, k=10).checkpoint_grid()
    assert cp[0] == 40 and cp[-1] == 40_000
    assert np.all(np.diff(cp) > 0)
    assert 110 <= len(cp) <= 125  # about 40 per decade over three decades
    assert list(ExperimentConfig(T=100, k=5, checkpoints=[50, 10, 100]).checkpoint_grid()) == [10, 50, 100]
    with pytest.raises(ConfigError):
        ExperimentConfig(T=100, k=5, checkpoints=[0, 100]).checkpoint_grid()


def test_theory_k_config():
    cfg = ExperimentConfig(T=40_000, k="theory", runs=1)
    assert cfg.k_value > 10
    assert cfg.to_dict()["k_resolved"] == cfg.k_value


def test_oracle_regret_exactly_zero():
    tr = run_experiment(ExperimentConfig(policy="oracle", T=500, runs=3))
    for name in ("regret_q", "regret_cl", "disturbance", "disturbance_star"):
        assert np.all(tr.mean[name] == 0.0) and np.all(tr.se[name] == 0.0)


def test_single_run_is_flagged_degenerate():
    tr = run_experiment(ExperimentConfig(T=400, k=5, runs=1))
    assert tr.degenerate
    assert np.all(tr.se["regret_q"] == 0.0) and np.all(tr.se["infidelity"] == 0.0)


def test_trace_invariants(small_trace):
    _, tr = small_trace
    for name in ("regret_q", "regret_cl", "disturbance", "infidelity", "lambda_min", "lambda_max"):
        assert np.all(np.isfinite(tr.mean[name]))
        assert np.all(tr.se[name] >= 0)
    for name in ("regret_q", "regret_cl", "regret_fold", "disturbance", "disturbance_star"):
        assert np.all(np.diff(tr.per_run[name], axis=1) >= 0)
        assert np.all(np.diff(tr.mean[name]) >= 0)
    assert not tr.degenerate
    assert tr.diagnostics["eigen_violations"] == 0
    assert tr.diagnostics["batches"] == 4 * (2000 // 20)


def test_checkpoint_values_match_episode(small_trace):
    cfg, tr = small_trace
    ep = run_episode(cfg, 2)
    idx = tr.t - 1
    assert np.array_equal(tr.per_run["regret_q"][2], np.cumsum(ep.log.regret_q)[idx])
    assert np.array_equal(tr.per_run["infidelity"][2], ep.log.infidelity[idx])
    # diagnostic columns hold the last completed batch
    j = np.searchsorted(ep.batch_end, tr.t[-1], side="right") - 1
    assert tr.per_run["lambda_max"][2, -1] == ep.lambda_max[j]


def test_workers_do_not_change_results(small_trace):
    cfg, tr = small_trace
    par = run_experiment(ExperimentConfig(**SMALL, workers=2))
    for name in tr.per_run:
        assert np.array_equal(tr.per_run[name], par.per_run[name], equal_nan=True)


def test_emit_files(small_trace, tmp_path):
    cfg, tr = small_trace
    fits = fit_trace(tr, cfg)
    csv_path, json_path = emit(tr, fits, cfg, tmp_path / "out", deterministic=True)
    with open(csv_path) as fh:
        header = next(csv.reader(fh))
    assert tuple(header) == CSV_COLUMNS
    assert header == [
        "t", "regret_q_mean", "regret_q_se", "regret_cl_mean", "disturbance_mean", "disturbance_star_mean",
        "infidelity_mean", "infidelity_se", "lambda_min_mean", "lambda_max_mean", "coverage_rate",
    ]
    data = read_trace_csv(csv_path)
    assert np.array_equal(data["regret_q_mean"], tr.mean["regret_q"])
    summary = json.loads(json_path.read_text())
    assert summary["config"]["T"] == cfg.T
    assert set(summary["fits"]["log2"]) >= {"m", "b", "se_m", "se_b", "r2", "model"}
    assert "build" in summary and "timestamp" not in summary
    _, json2 = emit(tr, fits, cfg, tmp_path / "timed", wall_clock=1.5)
    timed = json.loads(json2.read_text())
    assert "timestamp" in timed and timed["wall_clock_s"] == 1.5


def test_emit_reports_path_on_io_error(small_trace, tmp_path):
    cfg, tr = small_trace
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        emit(tr, {}, cfg, blocker / "sub")


def test_same_config_gives_identical_files(tmp_path):
    args = ["run", "--T", "800", "--k", "5", "--runs", "3", "--seed", "11", "--deterministic"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("trace.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert main(args[:-1] + ["--seed", "12", "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "a" / "trace.csv").read_bytes() != (tmp_path / "c" / "trace.csv").read_bytes()


@pytest.mark.parametrize("policy", ["etc", "fixed-basis", "oracle"])
def test_cli_baselines(policy, tmp_path):
    assert main(["run", "--policy", policy, "--T", "600", "--runs", "2", "--out", str(tmp_path)]) == 0
    data = read_trace_csv(tmp_path / "trace.csv")
    assert np.all(np.isnan(data["lambda_max_mean"]))


def test_cli_fit(tmp_path, capsys):
    assert main(["run", "--T", "2000", "--k", "5", "--runs", "2", "--env", "fixed:0,0,1", "--out", str(tmp_path)]) == 0
    capsys.readouterr()
    assert main(["fit", "--in", str(tmp_path / "trace.csv"), "--model", "log2"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert set(res) >= {"m", "b", "se_m", "se_b", "r2", "model"}
    assert main(["fit", "--in", str(tmp_path / "trace.csv"), "--model", "power"]) == 0


def test_cli_errors(tmp_path, capsys):
    assert main(["run", "--T", "10", "--out", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["fit", "--in", str(tmp_path / "missing.csv"), "--model", "log2"]) == 2


def test_gaussian_noise_in_higher_dimension(tmp_path):
    assert main(["run", "--T", "2000", "--k", "5", "--runs", "2", "--dim", "5", "--noise", "gaussian", "--out", str(tmp_path)]) == 0
    data = read_trace_csv(tmp_path / "trace.csv")
    assert np.all(np.isnan(data["regret_q_mean"]))
    assert np.all(np.isfinite(data["regret_cl_mean"]))

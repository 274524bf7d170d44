"""Seeded multi-run experiments, checkpoint aggregation and file output."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import EtcConfig, default_alpha, etc_policy, fixed_basis_policy, oracle_policy
from .environments import episode_seeds, make_env, make_rng, random_pure_state
from .estimator import in_confidence
from .exceptions import ConfigError
from .fits import FitResult, fit_infidelity_power, fit_regret_log2
from .policy import DEFAULT_WEIGHT_BETA, LinUCBVVN, lambda0_min, resolve_weight_beta, theory_k
from .records import StepLog, build_log

logger = logging.getLogger(__name__)

POLICIES = ("linucb-vvn", "etc", "fixed-basis", "oracle")

CSV_COLUMNS = (
    "t",
    "regret_q_mean",
    "regret_q_se",
    "regret_cl_mean",
    "disturbance_mean",
    "disturbance_star_mean",
    "infidelity_mean",
    "infidelity_se",
    "lambda_min_mean",
    "lambda_max_mean",
    "coverage_rate",
)

CUMULATIVE = ("regret_q", "regret_cl", "regret_fold", "disturbance", "disturbance_star")
PER_RUN = CUMULATIVE + ("infidelity", "lambda_min", "lambda_max", "coverage")


@dataclass
class ExperimentConfig:
    policy: str = "linucb-vvn"
    T: int = 40_000
    k: int | str = 10
    runs: int = 100
    master_seed: int = 0
    lambda0: float = 2.0
    n_dim: int = 3
    noise: str = "born"
    env: str = "random"
    alpha: float | None = None
    explore_scheme: str = "fixed_basis"
    weight_beta: float | str = DEFAULT_WEIGHT_BETA
    checkpoints: list[int] | None = None
    points_per_decade: int = 40
    fit_window: str = "second_half"
    regret_fit_column: str = "regret_cl_mean"
    workers: int = 1

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown policy {self.policy!r}; choose from {POLICIES}")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.T < 1:
            raise ConfigError("T must be >= 1")
        if self.policy == "linucb-vvn":
            if self.k_value < 1:
                raise ConfigError("k must be >= 1")
            if self.T < 2 * self.batch_size:
                raise ConfigError(f"T={self.T} is shorter than two batches of {self.batch_size}")
            w = resolve_weight_beta(self.weight_beta, self.n_dim, self.lambda0)
            if self.lambda0 < lambda0_min(self.n_dim, w):
                raise ConfigError(f"lambda0 below {lambda0_min(self.n_dim, w)}")
        if self.policy == "etc":
            EtcConfig(self.alpha_value, self.explore_scheme)
        self.fixed_theta  # validates the env string

    @property
    def k_value(self) -> int:
        return theory_k(self.T, self.n_dim) if self.k == "theory" else int(self.k)

    @property
    def batch_size(self) -> int:
        return 2 * (self.n_dim - 1) * self.k_value

    @property
    def alpha_value(self) -> float:
        return default_alpha(self.T) if self.alpha is None else float(self.alpha)

    @property
    def fixed_theta(self) -> np.ndarray | None:
        if self.env == "random":
            return None
        if not self.env.startswith("fixed:"):
            raise ConfigError(f"env must be 'random' or 'fixed:<x,y,...>', got {self.env!r}")
        try:
            theta = np.array([float(v) for v in self.env[len("fixed:"):].split(",")])
        except ValueError as exc:
            raise ConfigError(f"bad fixed environment {self.env!r}") from exc
        if theta.size != self.n_dim:
            raise ConfigError(f"fixed environment has {theta.size} coordinates, n_dim is {self.n_dim}")
        norm = np.linalg.norm(theta)
        if norm == 0:
            raise ConfigError("fixed environment vector is zero")
        return theta / norm

    def checkpoint_grid(self) -> np.ndarray:
        """Explicit checkpoints, or a geometric grid from the first batch boundary to T."""
        if self.checkpoints is not None:
            cp = np.unique(np.asarray(self.checkpoints, dtype=int))
            if cp[0] < 1 or cp[-1] > self.T:
                raise ConfigError("checkpoints must lie in [1, T]")
            return cp
        start = min(self.batch_size, self.T)
        n = max(2, int(round(self.points_per_decade * math.log10(self.T / start))) + 1)
        cp = np.unique(np.round(np.geomspace(start, self.T, n)).astype(int))
        return cp

    def to_dict(self) -> dict:
        out = asdict(self)
        out["k_resolved"] = self.k_value
        out["alpha_resolved"] = self.alpha_value if self.policy == "etc" else None
        return out


@dataclass
class Episode:
    """One run: full step log plus per-batch diagnostics (empty for baselines)."""

    theta: np.ndarray
    log: StepLog
    env_seed: int
    batch_end: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    lambda_min: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lambda_max: np.ndarray = field(default_factory=lambda: np.zeros(0))
    coverage: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    eigen_ok: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    variance_covered: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    final_wmom: np.ndarray | None = None
    final_action: np.ndarray | None = None


def run_episode(cfg: ExperimentConfig, run_index: int) -> Episode:
    """Run episode ``run_index`` with streams derived from ``cfg.master_seed``."""
    theta_seed, env_seed, policy_seed = episode_seeds(cfg.master_seed, run_index)
    theta = cfg.fixed_theta
    if theta is None:
        theta = random_pure_state(make_rng(theta_seed), cfg.n_dim)
    env = make_env(theta, cfg.noise, seed=env_seed)
    T = cfg.T
    if cfg.policy == "oracle":
        return Episode(theta, oracle_policy(env, T), env_seed)
    if cfg.policy == "fixed-basis":
        return Episode(theta, fixed_basis_policy(env, T, seed=policy_seed), env_seed)
    if cfg.policy == "etc":
        etc = EtcConfig(cfg.alpha_value, cfg.explore_scheme)
        return Episode(theta, etc_policy(env, T, etc, seed=policy_seed), env_seed)

    pol = LinUCBVVN(cfg.n_dim, cfg.k_value, cfg.lambda0, cfg.weight_beta, seed=policy_seed)
    n_batches = T // pol.batch_size
    played, rs, rts, held = [], [], [], []
    lam_min = np.empty(n_batches)
    lam_max = np.empty(n_batches)
    coverage = np.empty(n_batches, dtype=bool)
    eigen_ok = np.empty(n_batches, dtype=bool)
    var_ok = np.empty(n_batches, dtype=bool)
    for b in range(n_batches):
        sigma2 = pol.next_sigma2()
        a, r, rt, est = pol.play_batch(env)
        played.append(a)
        rs.append(r)
        rts.append(rt)
        held.append(np.broadcast_to(est, a.shape))
        lam = pol.V.eigvals
        lam_min[b], lam_max[b] = lam[0], lam[-1]
        coverage[b] = in_confidence(theta, pol.theta_wmom, pol.V, pol.beta)
        eigen_ok[b] = pol.eigen_relation_holds()
        # the weight is valid when sigma2 dominates the noise bound 1 - <theta, a>^2
        x = pol.last_actions @ theta
        var_ok[b] = bool(np.all(1.0 - x**2 <= sigma2 * (1.0 + 1e-12)))
    parts = [build_log(theta, np.concatenate(played), np.concatenate(rs), np.concatenate(rts), np.concatenate(held))]
    leftover = T - n_batches * pol.batch_size
    if leftover:
        logger.debug("run %d: %d leftover steps measured along the estimate", run_index, leftover)
        parts.append(pol.run_leftover(env, leftover))
    return Episode(
        theta=theta,
        log=StepLog.concat(parts),
        env_seed=env_seed,
        batch_end=np.arange(1, n_batches + 1) * pol.batch_size,
        lambda_min=lam_min,
        lambda_max=lam_max,
        coverage=coverage,
        eigen_ok=eigen_ok,
        variance_covered=var_ok,
        final_wmom=pol.theta_wmom.copy(),
        final_action=pol.current_estimate("action"),
    )


@dataclass
class RunSummary:
    """Checkpoint samples and batch diagnostics of one episode."""

    run_index: int
    env_seed: int
    columns: dict
    batch_lambda_max: np.ndarray
    eigen_violations: int
    coverage_hits: int
    variance_covered: int
    n_batches: int


def summarize_episode(ep: Episode, checkpoints: np.ndarray, run_index: int = 0) -> RunSummary:
    idx = checkpoints - 1
    cols = {name: np.cumsum(getattr(ep.log, name))[idx] for name in CUMULATIVE}
    cols["infidelity"] = ep.log.infidelity[idx]
    # latest completed batch at or before each checkpoint
    pos = np.searchsorted(ep.batch_end, checkpoints, side="right") - 1
    have = pos >= 0
    for name, src in (("lambda_min", ep.lambda_min), ("lambda_max", ep.lambda_max), ("coverage", ep.coverage)):
        vals = np.full(len(checkpoints), np.nan)
        vals[have] = np.asarray(src, dtype=float)[pos[have]]
        cols[name] = vals
    return RunSummary(
        run_index=run_index,
        env_seed=ep.env_seed,
        columns=cols,
        batch_lambda_max=ep.lambda_max,
        eigen_violations=int(np.sum(~ep.eigen_ok)),
        coverage_hits=int(np.sum(ep.coverage)),
        variance_covered=int(np.sum(ep.variance_covered)),
        n_batches=len(ep.batch_end),
    )


def _run_one(args) -> RunSummary:
    cfg, i, checkpoints = args
    return summarize_episode(run_episode(cfg, i), checkpoints, i)


@dataclass
class AggregateTrace:
    """Across-run means and standard errors at each checkpoint.

    ``per_run[name]`` keeps the (runs x checkpoints) matrix behind every
    column so run-level invariants can be checked after aggregation.
    """

    t: np.ndarray
    mean: dict
    se: dict
    per_run: dict
    runs: int
    degenerate: bool
    batch_lambda_max_mean: np.ndarray
    diagnostics: dict

    def column(self, name: str) -> np.ndarray:
        """CSV-style access, e.g. ``regret_q_mean`` or ``infidelity_se``."""
        if name == "t":
            return self.t
        if name == "coverage_rate":
            return self.mean["coverage"]
        base, _, stat = name.rpartition("_")
        return (self.mean if stat == "mean" else self.se)[base]

    def rows(self):
        cols = [self.column(c) for c in CSV_COLUMNS]
        for i in range(len(self.t)):
            yield [c[i] for c in cols]


def aggregate(summaries: list[RunSummary], checkpoints: np.ndarray) -> AggregateTrace:
    summaries = sorted(summaries, key=lambda s: s.run_index)
    runs = len(summaries)
    per_run = {name: np.vstack([s.columns[name] for s in summaries]) for name in PER_RUN}
    mean, se = {}, {}
    for name, M in per_run.items():
        if np.all(np.isnan(M)):
            mean[name] = np.full(M.shape[1], np.nan)
            se[name] = np.full(M.shape[1], np.nan)
            continue
        mean[name] = M.mean(axis=0)
        se[name] = M.std(axis=0, ddof=1) / math.sqrt(runs) if runs > 1 else np.zeros(M.shape[1])
    n_batches = sum(s.n_batches for s in summaries)
    lam = [s.batch_lambda_max for s in summaries]
    lam_mean = np.mean(np.vstack(lam), axis=0) if lam and lam[0].size else np.zeros(0)
    diagnostics = {
        "batches": n_batches,
        "eigen_violations": sum(s.eigen_violations for s in summaries),
        "coverage_rate_all_batches": (sum(s.coverage_hits for s in summaries) / n_batches) if n_batches else None,
        "variance_covered_rate": (sum(s.variance_covered for s in summaries) / n_batches) if n_batches else None,
        "env_seeds": [s.env_seed for s in summaries],
    }
    return AggregateTrace(checkpoints, mean, se, per_run, runs, runs == 1, lam_mean, diagnostics)


def run_experiment(cfg: ExperimentConfig) -> AggregateTrace:
    """Run ``cfg.runs`` independent episodes and aggregate them at the checkpoints."""
    checkpoints = cfg.checkpoint_grid()
    jobs = [(cfg, i, checkpoints) for i in range(cfg.runs)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            summaries = list(pool.map(_run_one, jobs))
    else:
        summaries = [_run_one(j) for j in jobs]
    return aggregate(summaries, checkpoints)


def fit_trace(trace: AggregateTrace, cfg: ExperimentConfig) -> dict[str, FitResult]:
    fits = {"log2": fit_regret_log2(trace.t, trace.column(cfg.regret_fit_column), cfg.fit_window)}
    infid = trace.mean["infidelity"]
    if np.any(infid > 0):
        fits["power"] = fit_infidelity_power(trace.t, infid, cfg.fit_window)
    return fits


def _build_id() -> str:
    try:
        rev = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if rev.returncode == 0 and rev.stdout.strip():
            return f"{__version__}+g{rev.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _num(x):
    x = float(x)
    return repr(x) if math.isfinite(x) else "nan"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def emit(trace: AggregateTrace, fits: dict, cfg: ExperimentConfig, out_path, deterministic=False, wall_clock=None):
    """Write ``trace.csv`` and ``summary.json`` into directory ``out_path``."""
    out = Path(out_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / "trace.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in trace.rows():
                writer.writerow([str(int(row[0]))] + [_num(v) for v in row[1:]])
        summary = {
            "config": cfg.to_dict(),
            "fits": {name: f.as_dict() for name, f in fits.items()},
            "runs": trace.runs,
            "degenerate_sample": trace.degenerate,
            "diagnostics": trace.diagnostics,
            "build": _build_id(),
        }
        if not deterministic:
            summary["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
            summary["wall_clock_s"] = wall_clock
        json_path = out / "summary.json"
        with open(json_path, "w") as fh:
            json.dump(_jsonable(summary), fh, indent=2, sort_keys=True, allow_nan=False)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"could not write results to {out}: {exc}") from exc
    return csv_path, json_path


def read_trace_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = [[float(v) for v in row] for row in reader if row]
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    return {name: arr[:, i] for i, name in enumerate(header)}


def default_workers() -> int:
    return max(1, (os.cpu_count() or 1))

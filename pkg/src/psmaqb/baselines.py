"""Reference policies: non-adaptive tomography, explore-then-commit, and the oracle.

All of them produce the same :class:`~psmaqb.records.StepLog` as LinUCB-VVN
and draw outcomes through ``env.draw``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environments import make_rng, random_pure_state
from .exceptions import ConfigError
from .records import StepLog, build_log

EXPLORE_SCHEMES = ("fixed_basis", "random_directions")


@dataclass(frozen=True)
class EtcConfig:
    alpha: float
    explore_scheme: str = "fixed_basis"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.explore_scheme not in EXPLORE_SCHEMES:
            raise ConfigError(f"unknown explore scheme {self.explore_scheme!r}")


def default_alpha(T: int) -> float:
    return 1.0 / math.sqrt(T)


def axis_directions(n_dim: int) -> np.ndarray:
    """+e_1, -e_1, +e_2, -e_2, ... as rows."""
    eye = np.eye(n_dim)
    return np.stack([s * eye[i] for i in range(n_dim) for s in (1.0, -1.0)])


def _normalize_rows(X, fallback):
    """Normalize each row; zero rows carry the last valid direction forward (``fallback`` first)."""
    norms = np.linalg.norm(X, axis=1)
    valid = norms > 0
    idx = np.maximum.accumulate(np.where(valid, np.arange(len(X)), -1))
    unit = np.divide(X, norms[:, None], out=np.zeros_like(X), where=valid[:, None])
    out = unit[np.maximum(idx, 0)]
    out[idx < 0] = fallback
    return out


def _axis_running_estimates(actions, r_tilde, prior):
    """Linear-inversion estimate held *before* each step of an axis cycle.

    Coordinate i is the mean of sign * r_tilde over the measurements along
    +-e_i taken so far (zero until the axis has been visited).
    """
    m, n = actions.shape
    signed = actions * r_tilde[:, None]
    counts = np.cumsum(np.abs(actions), axis=0)
    sums = np.cumsum(signed, axis=0)
    means = sums / np.maximum(counts, 1)
    after = _normalize_rows(means, prior)
    before = np.vstack([prior[None, :], after[:-1]]) if m else after
    return before, after[-1] if m else prior


def _ls_running_estimates(actions, r_tilde, prior):
    """Least-squares estimate from arbitrary directions, held before each step."""
    m, n = actions.shape
    G = np.cumsum(actions[:, :, None] * actions[:, None, :], axis=0)
    h = np.cumsum(actions * r_tilde[:, None], axis=0)
    sol = np.einsum("mij,mj->mi", np.linalg.pinv(G, hermitian=True), h)
    after = _normalize_rows(sol, prior)
    before = np.vstack([prior[None, :], after[:-1]]) if m else after
    return before, after[-1] if m else prior


def fixed_basis_policy(env, T: int, seed: int = 0) -> StepLog:
    """Cycle through +-e_i and keep a running axis-inversion estimate."""
    prior = random_pure_state(make_rng(seed), env.n_dim)
    dirs = axis_directions(env.n_dim)
    actions = dirs[np.arange(T) % len(dirs)]
    r, r_tilde = env.draw(actions)
    before, _ = _axis_running_estimates(actions, r_tilde, prior)
    return build_log(env.theta, actions, r, r_tilde, before)


def etc_policy(env, T: int, cfg: EtcConfig, seed: int = 0) -> StepLog:
    """Explore on ceil(alpha T) copies, then measure along the resulting estimate."""
    rng = make_rng(seed)
    prior = random_pure_state(rng, env.n_dim)
    n_explore = min(T, math.ceil(cfg.alpha * T))
    if cfg.explore_scheme == "fixed_basis":
        dirs = axis_directions(env.n_dim)
        explore = dirs[np.arange(n_explore) % len(dirs)]
    else:
        explore = np.stack([random_pure_state(rng, env.n_dim) for _ in range(n_explore)])
    r, r_tilde = env.draw(explore)
    if cfg.explore_scheme == "fixed_basis":
        before, final = _axis_running_estimates(explore, r_tilde, prior)
    else:
        before, final = _ls_running_estimates(explore, r_tilde, prior)
    parts = [build_log(env.theta, explore, r, r_tilde, before)]
    n_commit = T - n_explore
    if n_commit:
        commit = np.repeat(final[None, :], n_commit, axis=0)
        r2, r2_tilde = env.draw(commit)
        parts.append(build_log(env.theta, commit, r2, r2_tilde, final))
    return StepLog.concat(parts)


def oracle_policy(env, T: int) -> StepLog:
    """Measure along the true state every time (zero-regret control)."""
    actions = np.repeat(env.theta[None, :], T, axis=0)
    r, r_tilde = env.draw(actions)
    return build_log(env.theta, actions, r, r_tilde, env.theta)

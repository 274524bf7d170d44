"""LinUCB-VVN: batched optimistic exploration with variance-vanishing weights.

Each batch plays the ``2 (n_dim - 1)`` actions

    a = normalize(c +- v_i / sqrt(lambda_min(V)))

around the current direction estimate ``c``, where ``v_i`` are the
eigenvectors of the ``n_dim - 1`` smallest eigenvalues of the design
matrix. Every action is measured ``k`` times (one reward per MoM subsample)
and enters the design matrix with weight ``1 / sigma2``, where ``sigma2 = 1``
for the first batch and ``1 / omega(V)`` afterwards.
"""

from __future__ import annotations

import math

import numpy as np

from .environments import make_rng, random_pure_state
from .estimator import EstimatorBank, beta
from .exceptions import ConfigError, InvariantViolation
from .records import StepLog, build_log

# Constant used inside the weight omega. The confidence radius beta (466 at
# n_dim=3, lambda0=2) keeps omega ~ 1e-4 and the run in its linear burn-in for
# ~1e4 batches; 1/4 is an empirical calibration against the published
# regret curve. ``weight_beta="theory"`` restores beta.
DEFAULT_WEIGHT_BETA = 0.25


def omega(V, n_dim: int, beta_value: float) -> float:
    """Weight sqrt(lambda_max(V)) / (12 sqrt(n_dim - 1) beta)."""
    lam_max = V.lambda_max if hasattr(V, "lambda_max") else float(np.linalg.eigvalsh(V)[-1])
    return math.sqrt(lam_max) / (12.0 * math.sqrt(n_dim - 1) * beta_value)


def lambda0_min(n_dim: int, beta_value: float) -> float:
    """Smallest regularizer for which lambda_min >= sqrt(2/(3(n-1)) lambda_max) is guaranteed."""
    c = 1.0 / (12.0 * math.sqrt(n_dim - 1) * beta_value)
    r = 2.0 / (3.0 * (n_dim - 1))
    return max(2.0, 2.0 * math.sqrt(r) * n_dim * c + r)


def theory_k(T: int, n_dim: int = 3) -> int:
    """k = ceil(24 log(n_batches^2)) with the batch count implied by budget T and k itself."""
    best = 1
    for n_batches in range(2, T + 1):
        k = math.ceil(24.0 * math.log(n_batches**2))
        if 2 * (n_dim - 1) * k * n_batches > T:
            break
        best = k
    return best


def resolve_weight_beta(weight_beta, n_dim: int, lambda0: float) -> float:
    if weight_beta == "theory":
        return beta(n_dim, lambda0)
    value = float(weight_beta)
    if not value > 0:
        raise ConfigError(f"weight_beta must be positive, got {weight_beta}")
    return value


class LinUCBVVN:
    """Policy state for one episode.

    Parameters
    ----------
    n_dim : int
        Length of the parameter vector (3 for qubits).
    k : int
        Rewards per action, i.e. number of median-of-means subsamples.
    lambda0 : float
        Regularizer of the initial design matrix ``lambda0 I``.
    weight_beta : float or "theory"
        Constant in the weight ``omega``; see ``DEFAULT_WEIGHT_BETA``.
    seed : int
        Seed for the random initial estimate.
    """

    def __init__(self, n_dim=3, k=10, lambda0=2.0, weight_beta=DEFAULT_WEIGHT_BETA, seed=0):
        if n_dim < 2:
            raise ConfigError("n_dim must be >= 2")
        self.n_dim = int(n_dim)
        self.k = int(k)
        self.lambda0 = float(lambda0)
        self.beta = beta(self.n_dim, self.lambda0)
        self.weight_beta = resolve_weight_beta(weight_beta, self.n_dim, self.lambda0)
        needed = lambda0_min(self.n_dim, self.weight_beta)
        if self.lambda0 < needed:
            raise ConfigError(f"lambda0={lambda0} below the required minimum {needed}")
        self.bank = EstimatorBank(self.k, self.lambda0, self.n_dim)
        self.prior = random_pure_state(make_rng(seed), self.n_dim)
        self.theta_hat = self.prior.copy()
        self.theta_wmom = np.zeros(self.n_dim)
        self.batch_index = 0
        self.sigma2 = 1.0
        self.last_actions = None

    @property
    def V(self):
        return self.bank.V

    @property
    def batch_size(self) -> int:
        return 2 * (self.n_dim - 1) * self.k

    @property
    def ready(self) -> bool:
        return self.batch_index > 0

    def next_sigma2(self) -> float:
        if self.batch_index == 0:
            return 1.0
        return 1.0 / omega(self.V, self.n_dim, self.weight_beta)

    def select_actions(self) -> np.ndarray:
        """The 2(n_dim-1) unit actions of the next batch, ordered a+_1, a-_1, a+_2, ..."""
        lam = self.V.eigvals
        step = 1.0 / math.sqrt(lam[0])
        # rows +v_1, -v_1, +v_2, -v_2, ... over the n_dim - 1 smallest eigenvalues
        dirs = np.repeat(self.V.eigvecs[:, : self.n_dim - 1].T, 2, axis=0)
        dirs[1::2] *= -1.0
        out = self.theta_hat + step * dirs
        norms = np.linalg.norm(out, axis=1)
        if norms.min() < 1e-6:
            raise InvariantViolation(f"perturbed action has norm {norms.min()}")
        out /= norms[:, None]
        return out

    def observe_batch(self, actions, rewards, sigma2: float):
        """Feed a batch: ``rewards[i]`` holds the k renormalized rewards of ``actions[i]``."""
        self.bank.update_many(actions, rewards, 1.0 / sigma2)
        self.sigma2 = sigma2
        self.theta_wmom = self.bank.select()
        norm = np.linalg.norm(self.theta_wmom)
        if norm > 1e-300:
            self.theta_hat = self.theta_wmom / norm
        self.batch_index += 1
        self.last_actions = np.asarray(actions, dtype=float)

    def play_batch(self, env):
        """Play one batch and update; returns (played, r, r_tilde, estimate held during the batch)."""
        estimate = self.theta_hat.copy()
        sigma2 = self.next_sigma2()
        actions = self.select_actions()
        played = np.repeat(actions, self.k, axis=0)
        r, r_tilde = env.draw(played)
        self.observe_batch(actions, r_tilde.reshape(len(actions), self.k), sigma2)
        return played, r, r_tilde, estimate

    def run_batch(self, env) -> StepLog:
        """Play one batch against ``env`` and return its records in sampling order."""
        played, r, r_tilde, estimate = self.play_batch(env)
        return build_log(env.theta, played, r, r_tilde, estimate)

    def run_leftover(self, env, n_steps: int) -> StepLog:
        """Spend a remainder smaller than one batch measuring along the estimate."""
        estimate = self.theta_hat.copy()
        played = np.repeat(estimate[None, :], n_steps, axis=0)
        r, r_tilde = env.draw(played)
        return build_log(env.theta, played, r, r_tilde, estimate, in_batch=False)

    def current_estimate(self, mode: str = "wmom") -> np.ndarray:
        """Normalized MoM estimate (``"wmom"``) or the first action of the last batch (``"action"``).

        Before the first batch both modes return the random prior; check
        :attr:`ready` to tell the two apart.
        """
        if mode not in ("wmom", "action"):
            raise ConfigError(f"unknown estimate mode {mode!r}")
        if not self.ready:
            return self.prior.copy()
        if mode == "action":
            return self.last_actions[0].copy()
        return self.theta_hat.copy()

    def eigen_relation_holds(self, rtol: float = 1e-9) -> bool:
        """lambda_min(V) >= sqrt(2 / (3 (n_dim - 1)) lambda_max(V))."""
        lam = self.V.eigvals
        bound = math.sqrt(2.0 / (3.0 * (self.n_dim - 1)) * lam[-1])
        return lam[0] >= bound * (1.0 - rtol)

"""Seeded reward generators.

Every environment owns a ``numpy.random.Generator`` backed by Philox4x64, a
counter-based bit generator whose streams are identical on every platform.
Per-run streams are derived with :func:`episode_seeds`, which hashes the
master seed and the run index through ``numpy.random.SeedSequence``.

Outcomes for a batch of actions are drawn row by row in the given order, one
uniform (Born model) or one standard normal (Gaussian model) per row, so
``draw(A)`` consumes exactly the same stream as ``len(A)`` single draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch_map import QuantumDims, quantum_dim_for, renormalize_reward, trace_overlap
from .exceptions import ConfigError, DimensionMismatch

NOISE_MODELS = ("born", "gaussian")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def episode_seeds(master_seed: int, run_index: int, n: int = 3) -> list[int]:
    """Derive ``n`` independent 64-bit seeds for run ``run_index``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(run_index),))
    return [int(s) for s in ss.generate_state(n, dtype=np.uint64)]


def random_pure_state(rng: np.random.Generator, n_dim: int) -> np.ndarray:
    """Uniform point on the unit sphere in R^n_dim (Haar-random qubit for n_dim=3)."""
    if n_dim < 2:
        raise ConfigError("n_dim must be at least 2")
    while True:
        x = rng.standard_normal(n_dim)
        norm = np.linalg.norm(x)
        if norm > 1e-12:
            return x / norm


@dataclass(frozen=True)
class MeasurementOutcome:
    r: int
    r_tilde: float
    p: float
    post_state_aligned: int


def _check_actions(actions, n_dim):
    A = np.atleast_2d(np.asarray(actions, dtype=float))
    if A.shape[-1] != n_dim:
        raise DimensionMismatch(f"action length {A.shape[-1]} != n_dim {n_dim}")
    return A


class _SeededEnv:
    def __init__(self, theta, seed: int):
        theta = np.asarray(theta, dtype=float)
        if theta.ndim != 1:
            raise DimensionMismatch("theta must be a vector")
        norm = np.linalg.norm(theta)
        if abs(norm - 1.0) > 1e-9:
            raise ConfigError(f"theta must be unit norm, got {norm}")
        self.theta = theta / norm
        self.n_dim = theta.size
        self.reseed(seed)

    def reseed(self, seed: int):
        self.seed = int(seed)
        self.rng = make_rng(self.seed)
        return self

    def expected_inner(self, actions) -> np.ndarray:
        A = _check_actions(actions, self.n_dim)
        return np.clip(A @ self.theta, -1.0, 1.0)


class PureStateEnv(_SeededEnv):
    """Projective measurements on an unknown pure state with Bloch-type vector ``theta``.

    Measuring along ``a`` returns 1 (state collapses onto ``a``) with the
    Born probability ``trace_overlap(<a, theta>, d)``.
    """

    def __init__(self, theta, seed: int = 0, d: int = 2):
        self.dims = QuantumDims(d)
        super().__init__(theta, seed)
        if self.n_dim != self.dims.n_dim:
            raise DimensionMismatch(f"theta has length {self.n_dim}, expected {self.dims.n_dim}")

    @property
    def d(self) -> int:
        return self.dims.d

    def born_probabilities(self, actions) -> np.ndarray:
        return np.atleast_1d(trace_overlap(self.expected_inner(actions), self.d))

    def sample_measurements(self, actions):
        """Sample one outcome per row of ``actions``; returns (bits, probabilities)."""
        p = self.born_probabilities(actions)
        r = (self.rng.random(p.size) < p).astype(np.int8)
        return r, p

    def sample_measurement(self, a) -> MeasurementOutcome:
        r, p = self.sample_measurements(np.asarray(a, dtype=float)[None, :])
        bit = int(r[0])
        return MeasurementOutcome(bit, renormalize_reward(bit, self.d), float(p[0]), bit)

    def draw(self, actions):
        """Raw bits and renormalized rewards for each row of ``actions``."""
        r, _ = self.sample_measurements(actions)
        return r.astype(float), renormalize_reward(r, self.d)


class VanishingVarianceEnv(_SeededEnv):
    """Linear rewards <theta, a> + noise with Var[noise] <= 1 - <theta, a>^2.

    ``noise="born"`` produces the renormalized Born outcomes of a d-level
    system (needs n_dim = d^2 - 1). ``noise="gaussian"`` adds centred normal
    noise with variance exactly 1 - <theta, a>^2 and works for any n_dim;
    it is a synthetic model not tied to any quantum system.
    """

    def __init__(self, theta, noise: str = "born", seed: int = 0):
        if noise not in NOISE_MODELS:
            raise ConfigError(f"unknown noise model {noise!r}")
        super().__init__(theta, seed)
        self.noise = noise
        self.d = quantum_dim_for(self.n_dim)
        if noise == "born" and self.d is None:
            raise ConfigError(f"born noise needs n_dim = d^2 - 1, got {self.n_dim}")

    def draw(self, actions):
        x = self.expected_inner(actions)
        if self.noise == "born":
            p = np.atleast_1d(trace_overlap(x, self.d))
            r = (self.rng.random(p.size) < p).astype(float)
            return r, renormalize_reward(r, self.d)
        z = self.rng.standard_normal(x.size)
        sigma = np.sqrt(np.maximum(1.0 - x * x, 0.0))
        return np.full(x.size, np.nan), x + sigma * z

    def sample_linear(self, a) -> float:
        _, r_tilde = self.draw(np.asarray(a, dtype=float)[None, :])
        return float(r_tilde[0])


def make_env(theta, noise: str = "born", seed: int = 0):
    """Qubit environments get :class:`PureStateEnv`, everything else the linear model."""
    theta = np.asarray(theta, dtype=float)
    if noise == "born" and theta.size == 3:
        return PureStateEnv(theta, seed=seed, d=2)
    return VanishingVarianceEnv(theta, noise=noise, seed=seed)

"""Conversions between the quantum and the linear-bandit descriptions.

A pure state of a d-level system is represented by a real unit vector of
length ``n_dim = d**2 - 1`` (the Bloch vector for qubits). Measurement
probabilities are affine in inner products of such vectors, so everything in
this module is a closed-form scalar map. All functions accept numpy arrays
and broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, DimensionMismatch, OutOfRange

UNIT_TOL = 1e-12
PROB_TOL = 1e-9


@dataclass(frozen=True)
class QuantumDims:
    """Hilbert-space dimension ``d`` and the matching vector length."""

    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ConfigError(f"quantum dimension must be an integer >= 2, got {self.d}")

    @property
    def n_dim(self) -> int:
        return self.d * self.d - 1

    @classmethod
    def from_n_dim(cls, n_dim: int) -> "QuantumDims":
        """Inverse of ``n_dim``; raises ConfigError unless n_dim = d^2 - 1."""
        d = quantum_dim_for(n_dim)
        if d is None:
            raise ConfigError(f"n_dim={n_dim} is not of the form d^2 - 1")
        return cls(d)


def quantum_dim_for(n_dim: int) -> int | None:
    """Return d with d^2 - 1 == n_dim, or None if there is no such integer."""
    d = int(round(np.sqrt(n_dim + 1)))
    return d if d >= 2 and d * d - 1 == n_dim else None


def unit_vector(coords, tol: float = 1e-6) -> np.ndarray:
    """Normalize ``coords`` to unit length.

    Raises ConfigError for (near) zero vectors, where no direction exists.
    """
    x = np.asarray(coords, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch(f"expected a 1-d vector, got shape {x.shape}")
    norm = np.linalg.norm(x)
    if not np.isfinite(norm) or norm < tol:
        raise ConfigError(f"cannot normalize vector with norm {norm}")
    return x / norm


def is_unit(x, tol: float = UNIT_TOL) -> bool:
    return abs(float(np.linalg.norm(x)) - 1.0) <= tol


def _clamp_probability(p):
    p = np.asarray(p, dtype=float)
    if np.any(p < -PROB_TOL) or np.any(p > 1 + PROB_TOL):
        raise OutOfRange(f"probability outside [0, 1]: {p}")
    p = np.clip(p, 0.0, 1.0)
    return p if p.ndim else float(p)


def trace_overlap(inner, d: int = 2):
    """Born probability Tr(Pi_a Pi_theta) = (1 + (d-1) <a, theta>) / d."""
    inner = np.asarray(inner, dtype=float)
    return _clamp_probability((1.0 + (d - 1) * inner) / d)


def inner_from_trace(tr, d: int = 2):
    """Inverse of :func:`trace_overlap`: (d tr - 1) / (d - 1)."""
    out = (d * np.asarray(tr, dtype=float) - 1.0) / (d - 1)
    return out if out.ndim else float(out)


def renormalize_reward(r, d: int = 2):
    """Map a 0/1 outcome to (d r - 1)/(d - 1), which has mean <theta, a>."""
    out = (d * np.asarray(r, dtype=float) - 1.0) / (d - 1)
    return out if out.ndim else float(out)


def infidelity_pure(a, theta, d: int = 2):
    """1 - F between pure states with vectors ``a`` and ``theta``.

    Equal to (d-1)/d (1 - <theta, a>); for qubits this is |theta - a|^2 / 4.
    The last axis holds the coordinates, leading axes broadcast.
    """
    a = np.asarray(a, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if a.shape[-1] != theta.shape[-1]:
        raise DimensionMismatch(f"vector lengths differ: {a.shape[-1]} vs {theta.shape[-1]}")
    if a.shape[-1] != d * d - 1:
        raise DimensionMismatch(f"n_dim={a.shape[-1]} inconsistent with d={d}")
    inner = np.clip(np.sum(a * theta, axis=-1), -1.0, 1.0)
    out = (d - 1) / d * (1.0 - inner)
    return out if np.ndim(out) else float(out)


def _fold(p):
    # the measurement {psi, psi^c} is unchanged by swapping labels
    p = np.asarray(p, dtype=float)
    return np.maximum(p, 1.0 - p)


def step_disturbance(lam_max, p):
    """Expected infidelity of the observed post-measurement state, minus its minimum.

    Closed form 2 (lam_max - p)(lam_max + p - 1) with p folded to max(p, 1-p).
    """
    p = _fold(p)
    lam = np.asarray(lam_max, dtype=float)
    out = np.maximum(2.0 * (lam - p) * (lam + p - 1.0), 0.0)
    return out if out.ndim else float(out)


def step_disturbance_star(lam_max, p):
    """Infidelity between a qubit state and its averaged post-measurement state.

    Uses F = p^2 + (1-p)^2 + 2 sqrt(lam (1-lam) p (1-p)) with p folded to
    max(p, 1-p).
    """
    p = _fold(p)
    lam = np.asarray(lam_max, dtype=float)
    cross = np.sqrt(np.maximum(lam * (1.0 - lam) * p * (1.0 - p), 0.0))
    fid = p * p + (1.0 - p) ** 2 + 2.0 * cross
    out = np.clip(1.0 - fid, 0.0, 1.0)
    return out if out.ndim else float(out)

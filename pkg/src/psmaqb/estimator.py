"""Weighted online least squares with a median-of-means selection.

The ``k`` estimators share one regularized design matrix

    V_t = lambda0 I + sum_s w_s a_s a_s^T

and differ only in their reward accumulators ``b_i = sum_s w_s r_{s,i} a_s``.
Solves go through the eigendecomposition of ``V`` that the policy needs
anyway (n_dim is tiny), recomputed lazily after updates.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ConfigError, DimensionMismatch


class DesignMatrix:
    """Symmetric positive definite matrix with a cached eigendecomposition.

    Eigenvalues are kept in increasing order with matching eigenvector
    columns. The fresh matrix ``lambda0 I`` uses the canonical basis.
    """

    def __init__(self, lambda0: float, n_dim: int):
        if not lambda0 > 0:
            raise ConfigError(f"lambda0 must be positive, got {lambda0}")
        self.lambda0 = float(lambda0)
        self.n_dim = int(n_dim)
        self.V = self.lambda0 * np.eye(self.n_dim)
        self._eigvals = np.full(self.n_dim, self.lambda0)
        self._eigvecs = np.eye(self.n_dim)
        self.dirty = False

    def rank_one_update(self, a, weight: float) -> "DesignMatrix":
        a = np.asarray(a, dtype=float)
        if a.shape != (self.n_dim,):
            raise DimensionMismatch(f"expected vector of length {self.n_dim}, got {a.shape}")
        if not np.isfinite(weight) or weight < 0:
            raise ConfigError(f"weight must be finite and non-negative, got {weight}")
        if weight > 0:
            self.V += weight * np.outer(a, a)
            self.dirty = True
        return self

    def _refresh(self):
        if self.dirty:
            self._eigvals, self._eigvecs = np.linalg.eigh(self.V)
            self.dirty = False

    @property
    def eigvals(self) -> np.ndarray:
        self._refresh()
        return self._eigvals

    @property
    def eigvecs(self) -> np.ndarray:
        self._refresh()
        return self._eigvecs

    @property
    def lambda_min(self) -> float:
        return float(self.eigvals[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigvals[-1])

    def solve(self, b) -> np.ndarray:
        """V^{-1} b for a vector or for each row of a matrix."""
        U, lam = self.eigvecs, self.eigvals
        b = np.asarray(b, dtype=float)
        return ((b @ U) / lam) @ U.T

    def whiten(self, x) -> np.ndarray:
        """Map rows x to Lambda^{1/2} U^T x so that |y|_2 = |x|_V."""
        return (np.asarray(x, dtype=float) @ self.eigvecs) * np.sqrt(self.eigvals)

    def copy(self) -> "DesignMatrix":
        out = DesignMatrix.__new__(DesignMatrix)
        out.lambda0, out.n_dim = self.lambda0, self.n_dim
        out.V = self.V.copy()
        out._eigvals, out._eigvecs = self._eigvals.copy(), self._eigvecs.copy()
        out.dirty = self.dirty
        return out


def design_init(lambda0: float, n_dim: int) -> DesignMatrix:
    return DesignMatrix(lambda0, n_dim)


def _as_matrix(V):
    return V.V if isinstance(V, DesignMatrix) else np.asarray(V, dtype=float)


def weighted_norm(x, V) -> float:
    """sqrt(x^T V x)."""
    x = np.asarray(x, dtype=float)
    M = _as_matrix(V)
    if x.shape != (M.shape[0],):
        raise DimensionMismatch(f"vector shape {x.shape} vs matrix {M.shape}")
    return float(np.sqrt(max(x @ M @ x, 0.0)))


def beta(n_dim: int, lambda0: float, theta_norm: float = 1.0) -> float:
    """Confidence radius 9 (sqrt(9 n_dim) + lambda0 |theta|)^2 of the weighted MoM estimator."""
    return 9.0 * (np.sqrt(9.0 * n_dim) + lambda0 * theta_norm) ** 2


def in_confidence(theta, theta_hat, V, beta_value: float) -> bool:
    """True iff |theta - theta_hat|_V^2 <= beta."""
    theta = np.asarray(theta, dtype=float)
    theta_hat = np.asarray(theta_hat, dtype=float)
    if theta.shape != theta_hat.shape:
        raise DimensionMismatch(f"shapes {theta.shape} and {theta_hat.shape} differ")
    diff = theta - theta_hat
    return weighted_norm(diff, V) ** 2 <= beta_value


def lower_median(values) -> float:
    """The ceil(m/2)-th smallest of m values, always an element of the set."""
    v = np.sort(np.asarray(values, dtype=float))
    return float(v[(v.size + 1) // 2 - 1])


def mom_select(estimates, V) -> tuple[int, np.ndarray]:
    """Median-of-means choice among ``k`` least-squares estimates (rows).

    For each j, y_j is the lower median of the V-norm distances to the
    other k-1 estimates; the estimate with the smallest y_j wins, ties going
    to the lowest index. Returns the 0-based index and the estimate.
    """
    est = np.atleast_2d(np.asarray(estimates, dtype=float))
    k = est.shape[0]
    if k == 1:
        return 0, est[0].copy()
    if isinstance(V, DesignMatrix):
        Y = V.whiten(est)
    else:
        L = np.linalg.cholesky(_as_matrix(V))
        Y = est @ L
    dist = np.sqrt(np.sum((Y[:, None, :] - Y[None, :, :]) ** 2, axis=-1))
    # drop the zero self-distance on the diagonal
    off = dist[~np.eye(k, dtype=bool)].reshape(k, k - 1)
    y = np.sort(off, axis=1)[:, k // 2 - 1]
    j = int(np.argmin(y))
    return j, est[j].copy()


class EstimatorBank:
    """``k`` weighted least-squares accumulators sharing one design matrix."""

    def __init__(self, k: int, lambda0: float, n_dim: int):
        if k < 1:
            raise ConfigError(f"k must be >= 1, got {k}")
        self.k = int(k)
        self.n_dim = int(n_dim)
        self.V = DesignMatrix(lambda0, n_dim)
        self.b = np.zeros((self.k, self.n_dim))
        self._theta_tilde = np.zeros((self.k, self.n_dim))
        self._stale = False
        self.mom_index = 0

    def update(self, a, rewards, inv_sigma2: float) -> "EstimatorBank":
        """Add one action with its ``k`` rewards, all weighted by ``inv_sigma2``."""
        a = np.asarray(a, dtype=float)
        rewards = np.asarray(rewards, dtype=float)
        if rewards.shape != (self.k,):
            raise DimensionMismatch(f"expected {self.k} rewards, got shape {rewards.shape}")
        if a.shape != (self.n_dim,):
            raise DimensionMismatch(f"expected action of length {self.n_dim}, got {a.shape}")
        self.b += inv_sigma2 * np.outer(rewards, a)
        self.V.rank_one_update(a, inv_sigma2)
        self._stale = True
        return self

    def update_many(self, actions, rewards, inv_sigma2: float) -> "EstimatorBank":
        """Same as calling :meth:`update` on each row of ``actions`` and ``rewards``."""
        A = np.atleast_2d(np.asarray(actions, dtype=float))
        R = np.atleast_2d(np.asarray(rewards, dtype=float))
        if A.shape[1] != self.n_dim or R.shape != (A.shape[0], self.k):
            raise DimensionMismatch(f"actions {A.shape} and rewards {R.shape} do not match k={self.k}")
        if not np.isfinite(inv_sigma2) or inv_sigma2 < 0:
            raise ConfigError(f"weight must be finite and non-negative, got {inv_sigma2}")
        self.b += inv_sigma2 * (R.T @ A)
        if inv_sigma2 > 0:
            self.V.V += inv_sigma2 * (A.T @ A)
            self.V.dirty = True
        self._stale = True
        return self

    @property
    def theta_tilde(self) -> np.ndarray:
        if self._stale:
            self._theta_tilde = self.V.solve(self.b)
            self._stale = False
        return self._theta_tilde

    def select(self) -> np.ndarray:
        self.mom_index, est = mom_select(self.theta_tilde, self.V)
        return est


def bank_update(bank: EstimatorBank, a, rewards, inv_sigma2: float) -> EstimatorBank:
    return bank.update(a, rewards, inv_sigma2)

"""Per-measurement logs shared by every policy.

Logs are columnar: one numpy array per field, one entry per measurement in
sampling order. A :class:`StepRecord` is a single row view.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .bloch_map import quantum_dim_for, step_disturbance, step_disturbance_star, trace_overlap

SCALAR_FIELDS = (
    "r",
    "r_tilde",
    "p",
    "regret_q",
    "regret_cl",
    "regret_fold",
    "disturbance",
    "disturbance_star",
    "infidelity",
)


@dataclass(frozen=True)
class StepRecord:
    t: int
    action: np.ndarray
    r: float
    r_tilde: float
    p: float
    regret_q: float
    regret_cl: float
    regret_fold: float
    disturbance: float
    disturbance_star: float
    infidelity: float
    in_batch: bool


@dataclass
class StepLog:
    """Columnar log of a whole episode.

    ``p`` is the Born probability of the recorded outcome label and
    ``regret_q = 1 - p``. ``regret_fold = 1 - max(p, 1 - p)`` is the regret
    of the measurement basis irrespective of which projector is called the
    action; the disturbance formulas use the same folding. ``infidelity`` is
    1 - F of the estimate the policy holds when the step is taken.
    Quantum columns are NaN when the environment is not a d-level system.
    """

    actions: np.ndarray
    r: np.ndarray
    r_tilde: np.ndarray
    p: np.ndarray
    regret_q: np.ndarray
    regret_cl: np.ndarray
    regret_fold: np.ndarray
    disturbance: np.ndarray
    disturbance_star: np.ndarray
    infidelity: np.ndarray
    in_batch: np.ndarray

    def __len__(self):
        return self.r.size

    def __getitem__(self, i) -> StepRecord:
        i = int(i)
        kw = {name: float(getattr(self, name)[i]) for name in SCALAR_FIELDS}
        return StepRecord(t=i + 1, action=self.actions[i].copy(), in_batch=bool(self.in_batch[i]), **kw)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def concat(cls, parts: list["StepLog"]) -> "StepLog":
        if not parts:
            raise ValueError("nothing to concatenate")
        return cls(**{name: np.concatenate([getattr(p, name) for p in parts]) for name in cls.field_names()})

    def cumulative(self, name: str) -> np.ndarray:
        return np.cumsum(getattr(self, name))


def _snap(inner, tol=1e-12):
    # unit vectors dotted with themselves land a few ulps below 1
    inner = np.clip(inner, -1.0, 1.0)
    return np.where(np.abs(inner) > 1.0 - tol, np.sign(inner), inner)


def build_log(theta, actions, r, r_tilde, estimate_vectors, in_batch=True) -> StepLog:
    """Fill every derived column from the true state and what was played.

    ``estimate_vectors`` is either one vector (held for every step) or one
    row per step. The environment is pure, so lambda_max = 1 in the
    disturbance formulas.
    """
    theta = np.asarray(theta, dtype=float)
    A = np.atleast_2d(np.asarray(actions, dtype=float))
    m, n_dim = A.shape
    inner = _snap(A @ theta)
    est = np.asarray(estimate_vectors, dtype=float)
    est_inner = _snap(est @ theta)
    d = quantum_dim_for(n_dim)
    if d is None:
        nan = np.full(m, np.nan)
        p = regret_q = regret_fold = dist = dist_star = nan
        infid = np.broadcast_to((1.0 - est_inner) / 2.0, (m,)).copy()
    else:
        p = np.atleast_1d(trace_overlap(inner, d))
        regret_q = 1.0 - p
        regret_fold = 1.0 - np.maximum(p, 1.0 - p)
        dist = np.atleast_1d(step_disturbance(1.0, p))
        # closed-form fidelity of the averaged post-measurement state is qubit-only
        dist_star = np.atleast_1d(step_disturbance_star(1.0, p)) if d == 2 else np.full(m, np.nan)
        infid = np.broadcast_to((d - 1) / d * (1.0 - est_inner), (m,)).copy()
    return StepLog(
        actions=A,
        r=np.asarray(r, dtype=float),
        r_tilde=np.asarray(r_tilde, dtype=float),
        p=p,
        regret_q=regret_q,
        regret_cl=1.0 - inner,
        regret_fold=regret_fold,
        disturbance=dist,
        disturbance_star=dist_star,
        infidelity=infid,
        in_batch=np.broadcast_to(np.asarray(in_batch, dtype=bool), (m,)).copy(),
    )

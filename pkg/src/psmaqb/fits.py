"""Regressions on aggregated traces and closed-form reference curves."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from .exceptions import InsufficientData

WINDOWS = ("second_half", "all")


@dataclass(frozen=True)
class FitResult:
    """Ordinary least-squares line y = m x + b with standard errors."""

    m: float
    b: float
    se_m: float
    se_b: float
    r2: float
    model: str
    n_points: int

    def as_dict(self) -> dict:
        return asdict(self)


def _window(t, y, window):
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if window == "second_half":
        start = len(t) // 2
    elif window == "all":
        start = 0
    else:
        raise ValueError(f"unknown fit window {window!r}")
    return t[start:], y[start:]


def _ols(x, y, model) -> FitResult:
    if len(x) < 3:
        raise InsufficientData(f"need at least 3 points, got {len(x)}")
    res = stats.linregress(x, y)
    r2 = float(res.rvalue) ** 2
    return FitResult(
        m=float(res.slope),
        b=float(res.intercept),
        se_m=float(res.stderr),
        se_b=float(res.intercept_stderr),
        r2=r2,
        model=model,
        n_points=len(x),
    )


def fit_regret_log2(t, regret, window: str = "second_half") -> FitResult:
    """Fit regret(t) = m log^2 t + b."""
    t, y = _window(t, regret, window)
    return _ols(np.log(t) ** 2, y, "regret = m*log(t)^2 + b")


def fit_infidelity_power(t, infidelity, window: str = "second_half") -> FitResult:
    """Fit log(1 - F) = m log(log t / t) + log b; reports b = exp(intercept).

    With this regressor a 1/t-type decay gives m close to +1; the opposite
    sign convention (regressor log(t / log t)) flips the sign of m. Points
    with t <= e or non-positive infidelity are dropped.
    """
    t, y = _window(t, infidelity, window)
    keep = t > math.e
    bad = keep & ~(y > 0)
    if bad.any():
        warnings.warn(f"dropping {int(bad.sum())} checkpoints with non-positive infidelity", stacklevel=2)
    keep &= y > 0
    t, y = t[keep], y[keep]
    fit = _ols(np.log(np.log(t) / t), np.log(y), "1-F = b*(log(t)/t)^m; regressor log(log(t)/t), m = -slope against log(t/log(t))")
    # report the multiplicative constant; its error by the delta method
    b = math.exp(fit.b)
    return FitResult(fit.m, b, fit.se_m, b * fit.se_b, fit.r2, fit.model, fit.n_points)


def loglog_exponent(T, regret) -> FitResult:
    """Slope of log regret against log T."""
    T = np.asarray(T, dtype=float)
    regret = np.asarray(regret, dtype=float)
    return _ols(np.log(T), np.log(regret), "log(regret) = m*log(T) + b")


def lower_bound_curve(T, d: int = 2):
    """Average-case regret lower bound (d - 1) log(T / (d + 1)), floored at 0."""
    T = np.asarray(T, dtype=float)
    if np.any(T < 1):
        raise ValueError("T must be >= 1")
    out = np.maximum((d - 1) * np.log(T / (d + 1)), 0.0)
    return out if out.ndim else float(out)


def fidelity_bound_curve(n, d: int = 2):
    """Best average fidelity (n + 1) / (n + d) of any tomography on n copies."""
    n = np.asarray(n, dtype=float)
    if np.any(n < 0) or d < 2:
        raise ValueError("need n >= 0 and d >= 2")
    out = (n + 1.0) / (n + d)
    return out if out.ndim else float(out)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from psmaqb.bloch_map import (
    QuantumDims,
    infidelity_pure,
    inner_from_trace,
    is_unit,
    quantum_dim_for,
    renormalize_reward,
    step_disturbance,
    step_disturbance_star,
    trace_overlap,
    unit_vector,
)
from psmaqb.exceptions import ConfigError, DimensionMismatch, OutOfRange

from conftest import unit

vec3 = st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 1e-3
)


def test_quantum_dims():
    assert QuantumDims(2).n_dim == 3
    assert QuantumDims(3).n_dim == 8
    assert QuantumDims.from_n_dim(15).d == 4
    assert quantum_dim_for(5) is None
    with pytest.raises(ConfigError):
        QuantumDims(1)
    with pytest.raises(ConfigError):
        QuantumDims.from_n_dim(4)


def test_unit_vector():
    v = unit_vector([3.0, 0.0, 4.0])
    assert np.allclose(v, [0.6, 0.0, 0.8])
    assert is_unit(v)
    with pytest.raises(ConfigError):
        unit_vector([0.0, 0.0, 0.0])


@pytest.mark.parametrize("inner, expected", [(1.0, 1.0), (-1.0, 0.0), (0.0, 0.5)])
def test_trace_overlap_qubit(inner, expected):
    assert trace_overlap(inner, 2) == pytest.approx(expected, abs=1e-15)


def test_trace_overlap_clamps_drift_and_rejects_invalid():
    assert trace_overlap(1.0 + 1e-10, 2) == 1.0
    assert trace_overlap(-1.0 - 1e-10, 2) == 0.0
    with pytest.raises(OutOfRange):
        trace_overlap(1.1, 2)
    # for d=3 the smallest valid inner product is -1/2
    with pytest.raises(OutOfRange):
        trace_overlap(-0.9, 3)


@pytest.mark.parametrize("tr, d, expected", [(1.0, 2, 1.0), (0.5, 2, 0.0), (0.0, 3, -0.5)])
def test_inner_from_trace(tr, d, expected):
    assert inner_from_trace(tr, d) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("r, d, expected", [(1, 2, 1.0), (0, 2, -1.0), (0, 3, -0.5), (1, 3, 1.0)])
def test_renormalize_reward(r, d, expected):
    assert renormalize_reward(r, d) == expected


@pytest.mark.parametrize("d", [2, 3, 4])
def test_round_trip_random_points(d):
    rng = np.random.default_rng(d)
    x = rng.uniform(-1.0 / (d - 1), 1.0, size=1000)
    back = inner_from_trace(trace_overlap(x, d), d)
    assert np.max(np.abs(back - x)) <= 1e-12


def test_infidelity_examples():
    th = unit([1.0, 2.0, 2.0])
    assert infidelity_pure(th, th) == pytest.approx(0.0, abs=1e-15)
    assert infidelity_pure(-th, th) == pytest.approx(1.0)
    assert infidelity_pure([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]) == pytest.approx(0.5)
    with pytest.raises(DimensionMismatch):
        infidelity_pure([1.0, 0.0], [1.0, 0.0, 0.0])
    with pytest.raises(DimensionMismatch):
        infidelity_pure(np.ones(4) / 2, np.ones(4) / 2)


@given(vec3, vec3)
def test_qubit_infidelity_is_quarter_squared_distance(a, b):
    a, th = unit(a), unit(b)
    assert abs(infidelity_pure(a, th) - 0.25 * np.sum((th - a) ** 2)) <= 1e-12


def test_infidelity_broadcasts_over_rows():
    th = unit([0.0, 0.0, 1.0])
    A = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    assert np.allclose(infidelity_pure(A, th), [0.0, 0.5])


@pytest.mark.parametrize(
    "lam, p, expected",
    [(1.0, 1.0, 0.0), (1.0, 0.5, 0.5), (0.75, 0.75, 0.0)],
)
def test_step_disturbance_examples(lam, p, expected):
    # oracle: the closed form written out by hand
    assert step_disturbance(lam, p) == pytest.approx(expected, abs=1e-15)
    assert 2 * (lam - p) * (lam + p - 1) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize(
    "lam, p, expected",
    [(1.0, 1.0, 0.0), (1.0, 0.5, 1 - (0.25 + 0.25)), (0.75, 0.75, 0.0)],
)
def test_step_disturbance_star_examples(lam, p, expected):
    assert step_disturbance_star(lam, p) == pytest.approx(expected, abs=1e-12)


def test_disturbance_folds_p():
    assert step_disturbance(1.0, 0.2) == pytest.approx(step_disturbance(1.0, 0.8))
    assert step_disturbance_star(1.0, 0.2) == pytest.approx(step_disturbance_star(1.0, 0.8))


def _mixed_qubit_fidelity(lam, p):
    # oracle: Uhlmann fidelity of rho = diag(lam, 1-lam) with rho_t = p P + (1-p) P^c,
    # P the pure projector whose Born probability Tr(rho P) equals p
    q = (p - (1 - lam)) / (2 * lam - 1)
    c = math.sqrt(q * (1 - q))
    P = np.array([[q, c], [c, 1 - q]])
    Pc = np.eye(2) - P
    rho_t = p * P + (1 - p) * Pc
    rho = np.diag([lam, 1 - lam])
    w, U = np.linalg.eigh(rho)
    s = U @ np.diag(np.sqrt(np.clip(w, 0, None))) @ U.T
    m = s @ rho_t @ s
    return float(np.sum(np.sqrt(np.clip(np.linalg.eigvalsh(m), 0, None))) ** 2)


@given(st.floats(0.55, 1.0), st.floats(0.0, 1.0))
def test_disturbance_star_matches_matrix_fidelity(lam, t):
    p = 1 - lam + t * (2 * lam - 1)  # p in [1 - lam, lam]
    p = max(p, 1 - p)
    assert step_disturbance_star(lam, p) == pytest.approx(1 - _mixed_qubit_fidelity(lam, p), abs=1e-9)


@given(st.floats(0.5, 1.0))
def test_pure_sandwich_per_step(p):
    d = step_disturbance(1.0, p)
    ds = step_disturbance_star(1.0, p)
    assert d == pytest.approx(2 * p * (1 - p), abs=1e-12)
    assert ds == pytest.approx(2 * p * (1 - p), abs=1e-12)
    assert d <= 2 * (1 - p) + 1e-12
    assert (1 - p) - 1e-12 <= ds <= 2 * (1 - p) + 1e-12


@given(st.floats(0.5, 1.0), st.floats(1e-3, 1.0))
def test_disturbance_zero_iff_p_equals_lam(lam, gap):
    assert step_disturbance(lam, lam) == pytest.approx(0.0, abs=1e-12)
    assert step_disturbance_star(lam, lam) == pytest.approx(0.0, abs=1e-12)
    p = lam - gap * (lam - 0.5)
    if lam - p > 1e-6:
        assert step_disturbance(lam, p) > 0
        assert step_disturbance_star(lam, p) > 0


def test_vectorized_and_scalar_types():
    assert isinstance(trace_overlap(0.3), float)
    out = step_disturbance(1.0, np.array([0.5, 1.0]))
    assert out.shape == (2,)

"""Online learning of pure qubit states as a linear bandit with vanishing-variance noise."""

__version__ = "0.1.0"

from .baselines import EtcConfig, etc_policy, fixed_basis_policy, oracle_policy
from .bloch_map import (
    QuantumDims,
    infidelity_pure,
    inner_from_trace,
    renormalize_reward,
    step_disturbance,
    step_disturbance_star,
    trace_overlap,
)
from .environments import PureStateEnv, VanishingVarianceEnv, make_env, make_rng, random_pure_state
from .estimator import DesignMatrix, EstimatorBank, beta, in_confidence, mom_select, weighted_norm
from .exceptions import (
    ConfigError,
    DimensionMismatch,
    InsufficientData,
    InvariantViolation,
    NotReady,
    OutOfRange,
    PsmaqbError,
)
from .fits import FitResult, fidelity_bound_curve, fit_infidelity_power, fit_regret_log2, lower_bound_curve
from .harness import AggregateTrace, ExperimentConfig, emit, run_episode, run_experiment
from .policy import LinUCBVVN, lambda0_min, omega
from .records import StepLog, StepRecord

__all__ = [
    "AggregateTrace",
    "ConfigError",
    "DesignMatrix",
    "DimensionMismatch",
    "EstimatorBank",
    "EtcConfig",
    "ExperimentConfig",
    "FitResult",
    "InsufficientData",
    "InvariantViolation",
    "LinUCBVVN",
    "NotReady",
    "OutOfRange",
    "PsmaqbError",
    "PureStateEnv",
    "QuantumDims",
    "StepLog",
    "StepRecord",
    "VanishingVarianceEnv",
    "beta",
    "emit",
    "etc_policy",
    "fidelity_bound_curve",
    "fit_infidelity_power",
    "fit_regret_log2",
    "fixed_basis_policy",
    "in_confidence",
    "infidelity_pure",
    "inner_from_trace",
    "lambda0_min",
    "lower_bound_curve",
    "make_env",
    "make_rng",
    "mom_select",
    "omega",
    "oracle_policy",
    "random_pure_state",
    "renormalize_reward",
    "run_episode",
    "run_experiment",
    "step_disturbance",
    "step_disturbance_star",
    "trace_overlap",
    "weighted_norm",
]

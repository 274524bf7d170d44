"""
Polylogarithmic regret and 1/t infidelity
=========================================

A smaller version of the averaged experiment: 20 random states, T = 2e4.
The cumulative regret is fitted against log^2 t and the estimator's
infidelity against log(t)/t. Use the CLI for the full 100-run version:

    psmaqb run --T 40000 --k 10 --runs 100 --out results/
"""

import numpy as np

from psmaqb import ExperimentConfig, run_experiment
from psmaqb.fits import fit_infidelity_power, fit_regret_log2, lower_bound_curve

cfg = ExperimentConfig(T=20_000, k=10, runs=20, master_seed=7)
trace = run_experiment(cfg)

reg = fit_regret_log2(trace.t, trace.column("regret_cl_mean"))
inf = fit_infidelity_power(trace.t, trace.column("infidelity_mean"))
print(f"regret ~ {reg.m:.3f} log^2 t + {reg.b:.2f}   (R^2 = {reg.r2:.4f})")
print(f"1 - F ~ {inf.b:.3f} (log t / t)^{inf.m:.3f}   (R^2 = {inf.r2:.4f})")

for t in (100, 1000, 10_000, 20_000):
    i = np.searchsorted(trace.t, t)
    print(f"t={trace.t[i]:6d}  regret_q={trace.mean['regret_q'][i]:7.2f}  lower bound={lower_bound_curve(trace.t[i]):.2f}")

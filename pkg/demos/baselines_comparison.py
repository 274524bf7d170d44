"""
Why adaptivity matters
======================

Static tomography pays a constant regret per copy, explore-then-commit
with alpha = 1/sqrt(T) pays about sqrt(T), and LinUCB-VVN pays log^2 T.
"""

from psmaqb import ExperimentConfig, run_experiment

for T in (1_000, 10_000, 40_000):
    row = []
    for policy in ("fixed-basis", "etc", "linucb-vvn", "oracle"):
        tr = run_experiment(ExperimentConfig(policy=policy, T=T, runs=10, checkpoints=[T]))
        row.append(f"{policy}={tr.mean['regret_q'][-1]:9.1f}")
    print(f"T={T:6d}  " + "  ".join(row))

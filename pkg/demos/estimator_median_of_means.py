"""
Median of means over k least-squares estimates
==============================================

The bank keeps k reward accumulators that share one design matrix. One
outlier subsample can drag its own estimate far away but not the selected
one.
"""

import numpy as np

from psmaqb.environments import PureStateEnv, make_rng, random_pure_state
from psmaqb.estimator import EstimatorBank

rng = make_rng(1)
theta = random_pure_state(rng, 3)
env = PureStateEnv(theta, seed=2)
k = 7
bank = EstimatorBank(k, lambda0=2.0, n_dim=3)

for _ in range(300):
    a = random_pure_state(rng, 3)
    _, r = env.draw(np.repeat(a[None, :], k, axis=0))
    r[3] = 5.0  # corrupt one subsample
    bank.update(a, r, 1.0)

errors = np.linalg.norm(bank.theta_tilde - theta, axis=1)
print("per-subsample error:", np.round(errors, 3))
est = bank.select()
print("selected index", bank.mom_index, "error", round(float(np.linalg.norm(est - theta)), 3))

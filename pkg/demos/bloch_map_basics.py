"""
From qubit measurements to a linear bandit
==========================================

A pure qubit state is a unit vector theta on the Bloch sphere and a
projective measurement is another unit vector a. Everything the learner
sees is an affine function of <a, theta>.
"""

import numpy as np

from psmaqb import bloch_map as bm

theta = np.array([0.0, 0.6, 0.8])
a = np.array([0.0, 0.0, 1.0])
x = a @ theta

# Born probability of the outcome that collapses the state onto a
p = bm.trace_overlap(x)
print("<a, theta> =", x, " p =", p)

# the bit r in {0, 1} becomes a reward with mean <a, theta>
print("renormalized rewards:", bm.renormalize_reward(1), bm.renormalize_reward(0))

# per-step regret is the infidelity between probe and state
print("infidelity:", bm.infidelity_pure(a, theta), "= |theta - a|^2 / 4 =", np.sum((theta - a) ** 2) / 4)

# on a pure state both notions of disturbance equal 2 p (1 - p)
print("disturbance:", bm.step_disturbance(1.0, p), bm.step_disturbance_star(1.0, p), 2 * p * (1 - p))

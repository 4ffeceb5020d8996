"""
Joint diagonalization by Jacobi rotations
=========================================

A set of symmetric matrices sharing an eigenbasis is diagonalized exactly.
Noisy sets are diagonalized approximately and the objective never
decreases from one sweep to the next.
"""

import numpy as np

from ssir import joint_diagonalize

rng = np.random.default_rng(2)
Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
mats = [Q @ np.diag(rng.standard_normal(4)) @ Q.T for _ in range(8)]

res = joint_diagonalize(mats)
print("sweeps:", res.sweeps, "off-diagonal mass:", res.off_sum)
print("|Q^T V| (a signed permutation):\n", np.round(np.abs(Q.T @ res.V), 8))

# %%
# Perturb the set so no common basis exists.
noisy = [m + 0.1 * (e + e.T) for m, e in zip(mats, rng.standard_normal((8, 4, 4)))]
res = joint_diagonalize(noisy)
print("objective per sweep:", np.round(res.objective_trace, 6))
print("converged:", res.converged, "off-diagonal mass:", round(res.off_sum, 6))

"""
Lagged inverse-regression matrices
==================================

For a lag (k, l) the covariate at cell (i+k, j+l) is grouped by the slice
of the response at (i, j). The covariance of the group means is the
inverse-regression matrix for that lag.
"""

import numpy as np

from ssir import FIRST, lagged_moments, slice_response, whiten
from ssir.simulate import ExpCovParams, SimSpec, simulate_model

# Model A: y[i, j] = 2 z1[i+1, j] + 3 z2[i+1, j] + noise
sim = simulate_model(SimSpec("A", params=ExpCovParams(1.0, 1.0, 0.25), seed=1))
xst = whiten(sim.x)[0]
slices = slice_response(sim.y, H=10)

for m in lagged_moments(xst, slices, FIRST):
    print(f"lag {tuple(m.lag)!s:>9}  trace {np.trace(m.M):.4f}  pairs {m.n_valid}")

# %%
# Only lag (1, 0) carries the signal. Weak spatial correlation leaks a
# little of it into the neighbouring lags.

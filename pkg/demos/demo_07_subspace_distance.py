"""
Comparing estimated and true subspaces
======================================

The distance compares rank-weighted projectors, so it handles an
estimated dimension that differs from the true one.
"""

import numpy as np

from ssir import weighted_distance

e = np.eye(4)
print("same subspace      ", weighted_distance(e[:1], 5 * e[:1]))
print("orthogonal lines   ", weighted_distance(e[:1], e[1:2]))
print("plane vs its line  ", weighted_distance(e[:2], e[:1]))
print("  1/sqrt(d) weights", weighted_distance(e[:2], e[:1], "inverse_sqrt"))

"""
Whitening a multivariate field and slicing its response
========================================================

Every fit starts by standardizing the covariates to zero mean and identity
covariance, then cutting the response into H ordered slices.
"""

import numpy as np

from ssir import GridShape, MultiField, ScalarField, sample_mean_cov, slice_response, whiten

rng = np.random.default_rng(0)
shape = GridShape(40, 40, spacing=0.25)

# correlated covariates with an offset
mix = np.array([[1.0, 0.5, 0.0], [0.0, 2.0, 0.3], [0.0, 0.0, 0.1]])
x = MultiField(shape, rng.standard_normal((40, 40, 3)) @ mix.T + 5.0)
print("raw covariance\n", np.round(sample_mean_cov(x)[1], 3))

xst, mean, W = whiten(x)
print("whitened covariance\n", np.round(sample_mean_cov(xst)[1], 12) + 0.0)

# %%
# Slicing uses empirical quantiles, so it only sees the ranks of y.
# Tied values always share a slice.
y = ScalarField(shape, np.round(rng.standard_normal((40, 40)), 1))
s = slice_response(y, H=10)
print("effective H:", s.H)
print("slice counts:", s.counts.tolist())

same = slice_response(ScalarField(shape, np.exp(y.values)), H=10)
print("labels unchanged under exp(y):", np.array_equal(s.labels, same.labels))

"""Discretization of a continuous response field into slices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateResponseError, SsirError
from .grid import GridShape, ScalarField


@dataclass(frozen=True)
class SliceAssignment:
    shape: GridShape
    H: int
    labels: np.ndarray  # (rows, cols) ints in 0..H-1
    boundaries: np.ndarray  # H-1 interior cut points
    counts: np.ndarray


def slice_response(y: ScalarField, H: int = 10) -> SliceAssignment:
    """Assign every cell to one of (at most) H equal-count slices.

    A response with at most H distinct values gets one slice per value.
    Otherwise the sorted response is cut after every ``ceil(h N / H)``-th
    order statistic. A value equal to a cut point belongs to the lower
    slice, so ties never straddle two slices; cut points that coincide
    because of ties are merged, which can lower the effective H.
    """
    if H < 2:
        raise SsirError(f"need at least 2 slices, got H={H}")
    v = y.values.ravel()
    n = v.size
    if n < H:
        raise SsirError(f"{n} cells cannot be split into {H} slices")

    distinct = np.unique(v)
    if distinct.size < 2:
        raise DegenerateResponseError("degenerate response: y is constant")
    if distinct.size <= H:
        bounds = distinct[:-1]
    else:
        ys = np.sort(v)
        idx = np.ceil(np.arange(1, H) * n / H).astype(int) - 1
        bounds = np.unique(ys[idx])
        # the top cut cannot be the maximum, or the last slice would be empty
        bounds = bounds[bounds < ys[-1]]

    labels = np.searchsorted(bounds, v, side="left")
    H_eff = bounds.size + 1
    counts = np.bincount(labels, minlength=H_eff)
    return SliceAssignment(
        shape=y.shape,
        H=H_eff,
        labels=labels.reshape(y.shape.rows, y.shape.cols),
        boundaries=bounds,
        counts=counts,
    )

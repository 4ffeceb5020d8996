"""Rank-weighted distance between subspace projectors."""

from __future__ import annotations

import numpy as np

from .errors import RankError

WEIGHTS = {
    "inverse": lambda d: 1.0 / d,
    "inverse_sqrt": lambda d: 1.0 / np.sqrt(d),
}
WEIGHTS["invsqrt"] = WEIGHTS["inverse_sqrt"]


def _as_basis(B) -> np.ndarray:
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.ndim != 2 or B.shape[0] < 1:
        raise RankError(f"basis must be a non-empty (d, p) matrix, got shape {B.shape}")
    return B


def projector(B, rcond: float = 1e-10) -> np.ndarray:
    """Orthogonal projector ``B^T (B B^T)^-1 B`` onto the row span of B."""
    B = _as_basis(B)
    d = B.shape[0]
    s = np.linalg.svd(B, compute_uv=False)
    if d > B.shape[1] or s[-1] <= rcond * s[0]:
        raise RankError(f"basis of {d} rows is rank deficient")
    P = B.T @ np.linalg.solve(B @ B.T, B)
    return 0.5 * (P + P.T)


def weighted_distance(B1, B2, weight: str = "inverse") -> float:
    """``0.5 * ||w(d1) P1 - w(d2) P2||_F^2`` for the row spans of B1 and B2."""
    try:
        w = WEIGHTS[weight]
    except KeyError:
        raise ValueError(f"unknown weight {weight!r}; use inverse or inverse_sqrt") from None
    B1, B2 = _as_basis(B1), _as_basis(B2)
    if B1.shape[1] != B2.shape[1]:
        raise RankError(f"ambient dimensions differ: {B1.shape[1]} vs {B2.shape[1]}")
    D = w(B1.shape[0]) * projector(B1) - w(B2.shape[0]) * projector(B2)
    return 0.5 * float(np.sum(D * D))

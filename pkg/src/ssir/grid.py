"""Grid-indexed field containers and symmetric-matrix kernels.

Fields are stored as C-ordered numpy arrays, so a ``(rows, cols, p)`` array
is exactly the cell-major, channel-minor flat layout with
``flat index = (i * cols + j) * p + c``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefiniteError, SsirError


@dataclass(frozen=True)
class GridShape:
    rows: int
    cols: int
    spacing: float = 1.0

    def __post_init__(self):
        if int(self.rows) != self.rows or self.rows < 1:
            raise SsirError(f"rows must be a positive integer, got {self.rows!r}")
        if int(self.cols) != self.cols or self.cols < 1:
            raise SsirError(f"cols must be a positive integer, got {self.cols!r}")
        if not (np.isfinite(self.spacing) and self.spacing > 0):
            raise SsirError(f"spacing must be positive, got {self.spacing!r}")

    @property
    def size(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True)
class MultiField:
    """A p-variate field on a regular grid; ``values`` has shape (rows, cols, p)."""

    shape: GridShape
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        if v.ndim == 2:
            v = v[:, :, None]
        if v.ndim != 3 or v.shape[:2] != (self.shape.rows, self.shape.cols):
            raise SsirError(
                f"values of shape {v.shape} do not match grid "
                f"{self.shape.rows}x{self.shape.cols}"
            )
        if v.shape[2] < 1:
            raise SsirError("a MultiField needs at least one channel")
        if not np.all(np.isfinite(v)):
            raise SsirError("field contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def p(self) -> int:
        return self.values.shape[2]

    def cells(self) -> np.ndarray:
        """Return the (rows*cols, p) matrix of cell vectors in row-major order."""
        return self.values.reshape(-1, self.p)

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    @classmethod
    def from_flat(cls, shape: GridShape, p: int, flat) -> "MultiField":
        return cls(shape, np.asarray(flat, dtype=float).reshape(shape.rows, shape.cols, p))


@dataclass(frozen=True)
class ScalarField:
    shape: GridShape
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        if v.shape != (self.shape.rows, self.shape.cols):
            raise SsirError(
                f"values of shape {v.shape} do not match grid "
                f"{self.shape.rows}x{self.shape.cols}"
            )
        if not np.all(np.isfinite(v)):
            raise SsirError("field contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def sym(m) -> np.ndarray:
    """Symmetrize a square matrix as (M + M^T) / 2."""
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)


def sample_mean_cov(x: MultiField) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel mean and the denominator-N sample covariance over all cells."""
    X = x.cells()
    n = X.shape[0]
    if n < 2:
        raise SsirError("need at least two cells to estimate a covariance")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = sym(Xc.T @ Xc / n)
    return mean, cov


def inv_sqrt_sym(S, rcond: float = 1e-12) -> np.ndarray:
    """Symmetric inverse square root ``V diag(w**-0.5) V^T`` of an SPD matrix.

    Raises
    ------
    NotPositiveDefiniteError
        If the smallest eigenvalue is at most ``rcond`` times the largest.
    """
    S = sym(S)
    w, V = np.linalg.eigh(S)
    if w[-1] <= 0 or w[0] <= rcond * w[-1]:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (eigenvalues in [{w[0]:.3g}, {w[-1]:.3g}])"
        )
    return sym((V * w ** -0.5) @ V.T)


def whiten(x: MultiField, rcond: float = 1e-12) -> tuple[MultiField, np.ndarray, np.ndarray]:
    """Standardize a field to zero mean and identity covariance.

    Returns the whitened field, the mean and the symmetric inverse square
    root of the covariance, so that ``xst[i, j] = W @ (x[i, j] - mean)``.
    """
    mean, cov = sample_mean_cov(x)
    W = inv_sqrt_sym(cov, rcond)
    Z = (x.cells() - mean) @ W  # W is symmetric
    return MultiField(x.shape, Z.reshape(x.values.shape)), mean, W

"""Spatial sliced inverse regression.

The fit whitens the covariate field, slices the response, estimates one
inverse-regression matrix per spatial lag, jointly diagonalizes them and
scores every (component, lag) cell by the matching diagonal entry.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, SsirError
from .grid import MultiField, ScalarField, whiten
from .jointdiag import JadResult, joint_diagonalize
from .moments import Lag, LagSet, lagged_moments, resolve_lagset
from .slicing import slice_response


@dataclass
class SsirFit:
    mean: np.ndarray
    cov_inv_sqrt: np.ndarray
    U: np.ndarray
    Gamma: np.ndarray
    lam: np.ndarray  # (p, K), normalized to total 1
    lag_order: LagSet
    row_sums: np.ndarray
    H: int
    lambda_power: int
    jad: JadResult
    moments: list = field(default_factory=list, repr=False)
    warnings: list = field(default_factory=list)

    @property
    def p(self) -> int:
        return self.U.shape[0]

    def directions(self, d: int) -> np.ndarray:
        """Leading ``d`` estimated directions as rows, in original coordinates."""
        if not 1 <= d <= self.p:
            raise SsirError(f"d must be in 1..{self.p}, got {d}")
        return self.Gamma[:d]

    def objective(self, U=None) -> float:
        """Sum over lags of squared diagonal entries of ``U M U^T``."""
        U = self.U if U is None else np.asarray(U)
        return float(np.sum(lambda_values(U, self.moments)))


@dataclass(frozen=True)
class SelectionResult:
    P: float
    selected_cells: tuple  # ((component, Lag), ...) in descending lambda order
    d_hat: int
    selected_lags: tuple
    components: tuple  # distinct selected components, ascending
    cumulative: float


def lambda_values(U, moments, power: int = 2) -> np.ndarray:
    """Unnormalized ``(u_c^T M_(k,l) u_c) ** power`` for every row ``u_c`` of U.

    ``power=2`` gives the squared diagonal entries whose sum the joint
    diagonalization maximizes. ``power=1`` gives the plain diagonal entries.
    """
    U = np.asarray(U, dtype=float)
    mats = np.array([getattr(m, "M", m) for m in moments], dtype=float)
    if mats.ndim != 3 or mats.shape[1:] != (U.shape[1], U.shape[1]):
        raise SsirError(
            f"dimension mismatch: U is {U.shape}, moments are {mats.shape[1:]}"
        )
    quad = np.einsum("ci,kij,cj->ck", U, mats, U)
    # PSD inputs can still give -1e-17 style round-off
    return np.clip(quad, 0.0, None) ** power


def ssir_fit(x: MultiField, y: ScalarField, lagset="first", H: int = 10,
             lambda_power: int = 1, tol: float = 1e-12,
             max_sweeps: int = 1000) -> SsirFit:
    """Fit SSIR for the lags in ``lagset`` using ``H`` response slices.

    The (component, lag) scores are the diagonal entries of the rotated
    inverse-regression matrices raised to ``lambda_power`` and normalized to
    sum to one. The default ``lambda_power=1`` scores with the plain
    diagonal entries. ``lambda_power=2`` scores with the squared entries
    that enter the diagonalization criterion.

    Approximate joint diagonalization of noisy matrices converges only
    linearly, so the sweep limit is ten times the diagonalizer's default.

    Components come back ordered by their score row sums, largest first.
    Each row of Gamma is signed so that its largest-magnitude entry is
    positive.
    """
    if lambda_power not in (1, 2):
        raise SsirError(f"lambda_power must be 1 or 2, got {lambda_power}")
    if (x.shape.rows, x.shape.cols) != (y.shape.rows, y.shape.cols):
        raise SsirError("covariate and response fields are on different grids")
    lagset = resolve_lagset(lagset)

    xst, mean, W = whiten(x)
    slices = slice_response(y, H)
    moments = lagged_moments(xst, slices, lagset)
    mats = np.array([m.M for m in moments])

    jad = joint_diagonalize(mats, tol=tol, max_sweeps=max_sweeps)
    notes = []
    if not jad.converged:
        scale = float(np.sum(mats**2))
        if jad.off_sum > 1e-6 * scale:
            raise ConvergenceError(
                f"joint diagonalization did not converge in {jad.sweeps} sweeps "
                f"(off-diagonal mass {jad.off_sum:.3g})"
            )
        msg = f"joint diagonalization stopped after {jad.sweeps} sweeps without converging"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)

    U = jad.V.T
    lam = lambda_values(U, moments, lambda_power)
    total = lam.sum()
    if total <= 0:
        raise SsirError("all inverse-regression matrices vanish; nothing to estimate")
    lam = lam / total
    order = np.argsort(-lam.sum(axis=1), kind="stable")
    U, lam = U[order], lam[order]

    Gamma = U @ W
    pivot = np.argmax(np.abs(Gamma), axis=1)
    signs = np.where(Gamma[np.arange(len(pivot)), pivot] < 0, -1.0, 1.0)
    U = U * signs[:, None]
    Gamma = Gamma * signs[:, None]

    return SsirFit(mean=mean, cov_inv_sqrt=W, U=U, Gamma=Gamma, lam=lam,
                   lag_order=lagset, row_sums=lam.sum(axis=1), H=slices.H,
                   lambda_power=lambda_power,
                   jad=jad, moments=moments, warnings=notes)


def select(fit, P: float) -> SelectionResult:
    """Keep the fewest largest lambda cells whose cumulative sum exceeds P.

    ``fit`` may be an SsirFit or anything with ``lam`` and ``lag_order``.
    Ties are broken by component index, then by lag order.
    """
    if not 0 < P < 1:
        raise SsirError(f"P must lie strictly between 0 and 1, got {P}")
    lam = np.asarray(fit.lam, dtype=float)
    lags = fit.lag_order
    p, K = lam.shape
    flat = lam.ravel()
    order = np.argsort(-flat, kind="stable")  # stable keeps row-major tie order
    csum = np.cumsum(flat[order])
    hits = np.nonzero(csum > P)[0]
    n_sel = int(hits[0]) + 1 if hits.size else flat.size
    cells = tuple((int(i // K), Lag(*lags[i % K])) for i in order[:n_sel])

    comps = sorted({c for c, _ in cells})
    seen = []
    for _, lag in cells:
        if lag not in seen:
            seen.append(lag)
    return SelectionResult(P=float(P), selected_cells=cells, d_hat=len(comps),
                           selected_lags=tuple(seen), components=tuple(comps),
                           cumulative=float(csum[n_sel - 1]))

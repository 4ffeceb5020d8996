"""Orthogonal joint approximate diagonalization by Jacobi rotations.

Cyclic sweeps over index pairs ``(a, b)``, ``a < b``; each pair is rotated by
the closed-form angle of Cardoso and Souloumiac (1996) that maximizes the sum
of squared diagonal entries of all matrices restricted to that pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SsirError


@dataclass
class JadResult:
    V: np.ndarray
    off_sum: float
    sweeps: int
    converged: bool
    objective_trace: list = field(default_factory=list)

    def diagonalized(self, matrices) -> np.ndarray:
        A = np.asarray(matrices, dtype=float)
        return np.einsum("ia,kij,jb->kab", self.V, A, self.V)


def off_diagonal_sum(A: np.ndarray) -> float:
    """Sum of squared off-diagonal entries over a (K, p, p) stack."""
    off = A * (1.0 - np.eye(A.shape[1]))
    return float(np.sum(off * off))


def diagonal_objective(A: np.ndarray) -> float:
    d = np.einsum("kii->ki", A)
    return float(np.sum(d * d))


def joint_diagonalize(matrices, tol: float = 1e-12, max_sweeps: int = 100) -> JadResult:
    """Find an orthogonal V making every ``V^T M_k V`` as diagonal as possible.

    Parameters
    ----------
    matrices : sequence of (p, p) symmetric arrays, or a (K, p, p) array
    tol : float
        A sweep in which every rotation has ``|sin(theta)| < tol`` ends the
        iteration.
    max_sweeps : int
        Hitting this limit returns ``converged=False``; it is not an error.

    Returns
    -------
    JadResult
        ``V`` holds the joint eigenvector estimates as columns.
        ``objective_trace`` records ``sum_k ||diag(V^T M_k V)||^2`` after
        each sweep, starting with the value at V = I.
    """
    try:
        A = np.array(matrices, dtype=float)
    except ValueError:
        raise SsirError("matrices must all have the same shape") from None
    if A.ndim == 2:
        A = A[None]
    if A.ndim != 3 or A.shape[1] != A.shape[2] or A.shape[0] < 1:
        raise SsirError(f"expected a stack of square matrices, got shape {A.shape}")
    A = 0.5 * (A + A.transpose(0, 2, 1))
    p = A.shape[1]
    V = np.eye(p)
    trace = [diagonal_objective(A)]

    sweeps = 0
    converged = p < 2
    while not converged and sweeps < max_sweeps:
        sweeps += 1
        converged = True
        for a in range(p - 1):
            for b in range(a + 1, p):
                h = np.stack([A[:, a, a] - A[:, b, b], A[:, a, b] + A[:, b, a]])
                G = h @ h.T
                if np.abs(G).max() < 1e-300:
                    continue
                ton = G[0, 0] - G[1, 1]
                toff = G[0, 1] + G[1, 0]
                theta = 0.5 * np.arctan2(toff, ton + np.hypot(ton, toff))
                c, s = np.cos(theta), np.sin(theta)
                if abs(s) < tol:
                    continue
                converged = False
                R = np.array([[c, -s], [s, c]])
                pair = [a, b]
                V[:, pair] = V[:, pair] @ R
                A[:, pair, :] = np.einsum("ji,kjn->kin", R, A[:, pair, :])
                A[:, :, pair] = A[:, :, pair] @ R
        trace.append(diagonal_objective(A))

    return JadResult(V=V, off_sum=off_diagonal_sum(A), sweeps=sweeps,
                     converged=converged, objective_trace=trace)

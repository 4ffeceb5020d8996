import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssir.errors import ConvergenceError, SsirError
from ssir.estimator import lambda_values, select, ssir_fit
from ssir.grid import GridShape, MultiField, ScalarField, whiten
from ssir.metrics import weighted_distance
from ssir.moments import FIRST, Lag, lagged_moments
from ssir.slicing import slice_response

from conftest import random_fields, simulated


def planted(rng, n=30, p=4):
    """Fields where y depends on channel 0 one row down."""
    x, _ = random_fields(rng, n, n, p)
    z = x.values[..., 0]
    y = np.zeros((n, n))
    y[:-1] = z[1:] + 0.3 * rng.standard_normal((n - 1, n))
    y[-1] = rng.standard_normal(n)
    return x, ScalarField(x.shape, y)


def test_onsite_is_sir(rng):
    for _ in range(5):
        x, y = planted(rng)
        fit = ssir_fit(x, y, "onsite", H=5)
        xst, _, W = whiten(x)
        (m,) = lagged_moments(xst, slice_response(y, 5), [(0, 0)])
        w, V = np.linalg.eigh(m.M)
        assert fit.lam.shape == (4, 1)
        np.testing.assert_allclose(np.sort(fit.lam[:, 0]), np.sort(w / w.sum()), atol=1e-10)
        lead = (V[:, -1] @ W)[None]
        assert weighted_distance(fit.Gamma[:1], lead) < 1e-8


class Stub:
    def __init__(self, lam, lags):
        self.lam = np.asarray(lam, dtype=float)
        self.lag_order = lags


def test_select_single_cell():
    s = select(Stub([[1.0, 0.0], [0.0, 0.0]], [(1, 0), (0, 1)]), 0.5)
    assert s.selected_cells == ((0, Lag(1, 0)),)
    assert s.d_hat == 1 and s.selected_lags == (Lag(1, 0),)


def test_select_uniform_ties_row_major():
    lam = np.full((2, 2), 0.25)
    s = select(Stub(lam, [(1, 0), (0, 1)]), 0.6)
    assert len(s.selected_cells) == 3
    assert s.selected_cells == ((0, Lag(1, 0)), (0, Lag(0, 1)), (1, Lag(1, 0)))
    assert s.d_hat == 2


def test_select_requires_strict_excess():
    s = select(Stub([[0.5, 0.3], [0.2, 0.0]], [(1, 0), (0, 1)]), 0.8)
    # 0.5 + 0.3 equals P exactly, so one more cell is needed
    assert len(s.selected_cells) == 3


def test_select_invalid_P():
    st_ = Stub([[1.0]], [(1, 0)])
    for P in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(SsirError):
            select(st_, P)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), P1=st.floats(0.01, 0.98), gap=st.floats(0.0, 0.5))
def test_select_monotone_in_P(seed, P1, gap):
    rng = np.random.default_rng(seed)
    lam = rng.random((3, 5))
    lam /= lam.sum()
    stub = Stub(lam, FIRST.lags[:5])
    P2 = min(P1 + gap, 0.99)
    a, b = select(stub, P1), select(stub, P2)
    assert a.d_hat <= b.d_hat
    assert set(a.selected_cells) <= set(b.selected_cells)
    assert a.cumulative > P1


def test_lambda_values_cases():
    e = np.eye(3)
    M = [np.diag([3.0, 0.0, 0.0])]
    np.testing.assert_allclose(lambda_values(e, M), [[9.0], [0.0], [0.0]])
    np.testing.assert_allclose(lambda_values(e, M, power=1), [[3.0], [0.0], [0.0]])
    np.testing.assert_array_equal(lambda_values(e, [np.zeros((3, 3))]), np.zeros((3, 1)))
    with pytest.raises(SsirError):
        lambda_values(np.eye(2), M)


def test_lambda_sum_bounded_by_frobenius(rng):
    for _ in range(20):
        A = rng.standard_normal((5, 4, 4))
        mats = A @ A.transpose(0, 2, 1)
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        assert lambda_values(Q.T, mats).sum() <= np.sum(mats**2) + 1e-9


def test_fit_basic_invariants(rng):
    x, y = planted(rng)
    fit = ssir_fit(x, y, "first")
    assert fit.lam.shape == (4, 8)
    assert fit.lam.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(fit.lam >= 0)
    np.testing.assert_allclose(fit.U @ fit.U.T, np.eye(4), atol=1e-10)
    assert np.all(np.diff(fit.row_sums) <= 0)
    assert np.argmax(fit.lam[0]) == FIRST.index((1, 0))
    assert np.argmax(np.abs(fit.Gamma[0])) == 0
    # Gamma = U W maps raw covariates to the whitened component scores
    cells = (x.cells() - fit.mean) @ fit.Gamma.T
    np.testing.assert_allclose(np.cov(cells.T, bias=True), np.eye(4), atol=1e-8)


def test_jad_is_a_local_optimum(rng):
    x, y = planted(rng)
    fit = ssir_fit(x, y, "first")
    best = fit.objective()
    for _ in range(100):
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        assert fit.objective(Q) <= best + 1e-12


def test_affine_equivariance(rng):
    for _ in range(5):
        x, y = planted(rng)
        A = rng.standard_normal((4, 4)) + 3 * np.eye(4)
        b = rng.standard_normal(4)
        x2 = MultiField(x.shape, x.values @ A.T + b)
        f1, f2 = ssir_fit(x, y), ssir_fit(x2, y)
        np.testing.assert_allclose(f1.lam, f2.lam, atol=1e-6)
        for d in (1, 2):
            assert weighted_distance(f1.directions(d), f2.directions(d) @ A) < 1e-6


def test_noise_channels_get_small_scores():
    sim = simulated("A", 0.25, 3)
    fit = ssir_fit(sim.x, sim.y, "first")
    assert np.all(fit.row_sums[2:] < 0.05)
    assert fit.lam[0, FIRST.index((1, 0))] > 0.7


def test_grid_mismatch_and_power():
    x = MultiField(GridShape(4, 4), np.random.default_rng(0).standard_normal((4, 4, 2)))
    y = ScalarField(GridShape(4, 5), np.arange(20.0).reshape(4, 5))
    with pytest.raises(SsirError):
        ssir_fit(x, y)
    with pytest.raises(SsirError):
        ssir_fit(x, ScalarField(GridShape(4, 4), np.arange(16.0).reshape(4, 4)),
                 lambda_power=3)


def test_unconverged_raises_or_warns(rng, monkeypatch):
    x, y = random_fields(rng, 20, 20, 5)
    with pytest.raises(ConvergenceError):
        ssir_fit(x, y, "first2", max_sweeps=1, tol=0.0)

    import ssir.estimator as est
    real = est.joint_diagonalize

    def stalled(mats, tol, max_sweeps):
        res = real(mats, tol=tol, max_sweeps=max_sweeps)
        return dataclasses.replace(res, converged=False, off_sum=0.0)

    monkeypatch.setattr(est, "joint_diagonalize", stalled)
    with pytest.warns(RuntimeWarning, match="without converging"):
        fit = ssir_fit(x, y, "first2")
    assert fit.warnings

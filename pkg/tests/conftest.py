from functools import lru_cache

import numpy as np
import pytest

from ssir.grid import GridShape, MultiField, ScalarField
from ssir.simulate import ExpCovParams, SimSpec, simulate_model


@lru_cache(maxsize=None)
def simulated(model: str, h0: float, seed: int, n: int = 100):
    spec = SimSpec(model=model, shape=GridShape(n, n, 0.25),
                   params=ExpCovParams(1.0, 1.0, h0), seed=seed)
    return simulate_model(spec)


def random_fields(rng, rows, cols, p):
    shape = GridShape(rows, cols, 1.0)
    x = MultiField(shape, rng.standard_normal((rows, cols, p)))
    y = ScalarField(shape, rng.standard_normal((rows, cols)))
    return x, y


def oracle_moment(xst, labels, lag):
    """Literal double loop over cells: pair y-label at (i, j) with x at (i+k, j+l)."""
    rows, cols, p = xst.shape
    k, l = lag
    xs, hs = [], []
    for i in range(rows):
        for j in range(cols):
            if 0 <= i + k < rows and 0 <= j + l < cols:
                xs.append(xst[i + k, j + l])
                hs.append(labels[i, j])
    xs, hs = np.array(xs), np.array(hs)
    mbar = xs.mean(axis=0)
    M = np.zeros((p, p))
    for h in sorted(set(hs.tolist())):
        sel = xs[hs == h]
        d = sel.mean(axis=0) - mbar
        M += len(sel) / len(xs) * np.outer(d, d)
    return M, len(xs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = []


@pytest.fixture
def acceptance_results():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)

"""Seeded simulation of latent Gaussian random fields and the response models.

Latent fields have the isotropic exponential covariance with a nugget,
``C(h) = C0 exp(-h / h0) + C1 [h == 0]``. The smooth part is drawn exactly by
circulant embedding; the nugget is added as independent per-cell noise.

Random numbers come from numpy's PCG64 bit generator. ``SeedSequence(seed)``
is spawned into one child stream per latent channel plus one for the
response noise, so channels are independent by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import EmbeddingError, SsirError
from .grid import GridShape, MultiField, ScalarField
from .moments import Lag

RNG_NAME = "numpy.random.PCG64 via SeedSequence(seed).spawn(5): z1..z4, eps"
MODELS = ("A", "B", "C")
WEAK_H0 = 0.25
STRONG_H0 = 15.0
DEPENDENCE = {"weak": WEAK_H0, "strong": STRONG_H0}


@dataclass(frozen=True)
class ExpCovParams:
    C0: float = 1.0
    C1: float = 1.0
    h0: float = WEAK_H0

    def __post_init__(self):
        if not self.h0 > 0:
            raise SsirError("h0 must be positive")
        if not self.C0 >= 0:
            raise SsirError("C0 must be non-negative")
        if not self.C1 >= 0:
            raise SsirError("C1 must be non-negative")

    def __call__(self, h):
        h = np.asarray(h, dtype=float)
        return self.C0 * np.exp(-h / self.h0) + self.C1 * (h == 0)

    @property
    def sill(self) -> float:
        return self.C0 + self.C1


def _torus_spectrum(shape: GridShape, params: ExpCovParams, m1: int, m2: int) -> np.ndarray:
    d1 = np.minimum(np.arange(m1), m1 - np.arange(m1)) * shape.spacing
    d2 = np.minimum(np.arange(m2), m2 - np.arange(m2)) * shape.spacing
    c = params.C0 * np.exp(-np.hypot(d1[:, None], d2[None, :]) / params.h0)
    return np.fft.fft2(c).real


@lru_cache(maxsize=16)
def embedding_spectrum(shape: GridShape, params: ExpCovParams, max_doublings: int = 3):
    """Eigenvalues of the smallest nonnegative circulant embedding.

    Starts from the ``2(n-1)``-periodic torus in each axis and doubles it up
    to ``max_doublings`` times. Eigenvalues above ``-1e-10 * max`` count as
    round-off and are clipped to zero. Results are cached and read-only.
    """
    m1 = max(1, 2 * (shape.rows - 1))
    m2 = max(1, 2 * (shape.cols - 1))
    for _ in range(max_doublings + 1):
        lam = _torus_spectrum(shape, params, m1, m2)
        floor = -1e-10 * max(lam.max(), 1e-300)
        if lam.min() >= floor:
            lam = np.clip(lam, 0.0, None)
            lam.flags.writeable = False
            return lam
        worst = lam.min()
        m1, m2 = 2 * m1, 2 * m2
    raise EmbeddingError(
        f"circulant embedding is indefinite after {max_doublings} doublings "
        f"(most negative eigenvalue {worst:.6g})"
    )


def simulate_grf(shape: GridShape, params: ExpCovParams, seed=None, *,
                 rng: np.random.Generator | None = None) -> ScalarField:
    """Draw one zero-mean stationary Gaussian field on ``shape``.

    Pass either an integer ``seed`` or an explicit ``rng``.
    """
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(seed))
    n1, n2 = shape.rows, shape.cols
    out = np.zeros((n1, n2))
    if params.C0 > 0:
        lam = embedding_spectrum(shape, params)
        m1, m2 = lam.shape
        xi = rng.standard_normal((m1, m2)) + 1j * rng.standard_normal((m1, m2))
        w = np.fft.fft2(np.sqrt(lam / (m1 * m2)) * xi)
        out += w.real[:n1, :n2]
    if params.C1 > 0:
        out += np.sqrt(params.C1) * rng.standard_normal((n1, n2))
    return ScalarField(shape, out)


def dense_covariance(shape: GridShape, params: ExpCovParams) -> np.ndarray:
    """Exact (N, N) covariance of the row-major flattened field."""
    i, j = np.divmod(np.arange(shape.size), shape.cols)
    h = shape.spacing * np.hypot(i[:, None] - i[None, :], j[:, None] - j[None, :])
    return params(h)


def simulate_grf_dense(shape: GridShape, params: ExpCovParams, n_draws: int,
                       seed=None) -> np.ndarray:
    """Reference sampler using the symmetric square root of the dense covariance.

    Only practical for small grids. Returns an array (n_draws, rows, cols).
    """
    C = dense_covariance(shape, params)
    w, V = np.linalg.eigh(C)
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n_draws, shape.size))
    return (Z @ root).reshape(n_draws, shape.rows, shape.cols)


# (coefficient vector, lag) pairs spanning the true subspace of each model
TRUTH = {
    "A": (((2.0, 3.0, 0.0, 0.0), Lag(1, 0)),),
    "B": (((2.0, 0.0, 0.0, 0.0), Lag(1, 0)), ((0.0, 3.0, 0.0, 0.0), Lag(2, -2))),
    "C": (((1.0, 0.0, 0.0, 0.0), Lag(1, 0)), ((0.0, 1.0, 0.0, 0.0), Lag(1, 0))),
}


@dataclass(frozen=True)
class SimSpec:
    model: str = "A"
    shape: GridShape = GridShape(100, 100, 0.25)
    params: ExpCovParams = ExpCovParams()
    noise_sd: float = 1.0
    seed: int = 0
    margin: int = 2

    def __post_init__(self):
        if self.model not in MODELS:
            raise SsirError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.margin < 2:
            raise SsirError("margin must be at least 2 for models A, B and C")
        if not self.noise_sd >= 0:
            raise SsirError("noise_sd must be non-negative")


@dataclass(frozen=True)
class SimOutput:
    x: MultiField
    y: ScalarField
    truth: tuple
    meta: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return len(self.truth)

    def truth_basis(self) -> np.ndarray:
        return np.array([v for v, _ in self.truth])


def _response(model: str, z: np.ndarray, m: int, rows: int, cols: int) -> np.ndarray:
    """Signal part of y on the core grid; ``z`` is (4, rows+2m, cols+2m)."""

    def at(c, k, l):  # z_c[i+k, j+l] for every core cell (i, j)
        return z[c, m + k:m + k + rows, m + l:m + l + cols]

    if model == "A":
        return 2 * at(0, 1, 0) + 3 * at(1, 1, 0)
    if model == "B":
        return 2 * at(0, 1, 0) + 3 * at(1, 2, -2)
    return at(0, 1, 0) / (0.5 + (at(1, 1, 0) + 1.5)) ** 2


def simulate_model(spec: SimSpec) -> SimOutput:
    shape, m = spec.shape, spec.margin
    ext = GridShape(shape.rows + 2 * m, shape.cols + 2 * m, shape.spacing)
    streams = np.random.SeedSequence(spec.seed).spawn(5)
    z = np.stack([
        simulate_grf(ext, spec.params, rng=np.random.Generator(np.random.PCG64(s))).values
        for s in streams[:4]
    ])
    eps_rng = np.random.Generator(np.random.PCG64(streams[4]))
    eps = spec.noise_sd * eps_rng.standard_normal((shape.rows, shape.cols))
    y = _response(spec.model, z, m, shape.rows, shape.cols) + eps
    x = np.moveaxis(z[:, m:m + shape.rows, m:m + shape.cols], 0, -1)
    meta = {
        "model": spec.model, "rows": shape.rows, "cols": shape.cols,
        "spacing": shape.spacing, "C0": spec.params.C0, "C1": spec.params.C1,
        "h0": spec.params.h0, "noise_sd": spec.noise_sd, "seed": spec.seed,
        "margin": m, "rng": RNG_NAME,
    }
    return SimOutput(MultiField(shape, x), ScalarField(shape, y), TRUTH[spec.model], meta)

"""Spatially lagged inverse-regression matrices.

For a lag ``(k, l)`` the response label at cell ``(i, j)`` is paired with the
whitened covariate vector at ``(i + k, j + l)``; pairs that leave the grid
are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import SsirError
from .grid import MultiField, sym
from .slicing import SliceAssignment


class Lag(NamedTuple):
    k: int
    l: int


@dataclass(frozen=True)
class LagSet:
    lags: tuple[Lag, ...]
    name: str = "custom"

    def __post_init__(self):
        lags = tuple(Lag(int(k), int(l)) for k, l in self.lags)
        if not lags:
            raise SsirError("lag set is empty")
        seen = set()
        for lag in lags:
            if lag in seen:
                raise SsirError(f"duplicate lag {tuple(lag)}")
            seen.add(lag)
        object.__setattr__(self, "lags", lags)

    def __len__(self):
        return len(self.lags)

    def __iter__(self):
        return iter(self.lags)

    def __getitem__(self, i):
        return self.lags[i]

    def index(self, lag) -> int:
        return self.lags.index(Lag(*lag))

    def as_list(self) -> list[list[int]]:
        return [[lag.k, lag.l] for lag in self.lags]


FIRST = LagSet(
    ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, 1), (1, -1), (-1, -1)),
    name="first",
)
FIRST2 = LagSet(
    FIRST.lags
    + tuple(
        Lag(k, l)
        for k, l in [
            (2, 0), (2, 1), (2, 2), (2, -1), (2, -2),
            (-2, 0), (-2, 1), (-2, 2), (-2, -1), (-2, -2),
            (1, 2), (-1, 2), (1, -2), (-1, -2), (0, 2), (0, -2),
        ]
    ),
    name="first2",
)
SE = LagSet(((1, 1),), name="se")
ONSITE = LagSet(((0, 0),), name="onsite")

PRESETS = {s.name: s for s in (FIRST, FIRST2, SE, ONSITE)}


def parse_lag_text(text: str, name: str = "custom") -> LagSet:
    """Parse one ``k l`` integer pair per line; ``#`` starts a comment."""
    lags = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SsirError(f"line {lineno}: expected 'k l', got {raw!r}")
        try:
            lags.append(Lag(int(parts[0]), int(parts[1])))
        except ValueError:
            raise SsirError(f"line {lineno}: lags must be integers, got {raw!r}") from None
    return LagSet(tuple(lags), name=name)


def load_lagset(path) -> LagSet:
    path = Path(path)
    return parse_lag_text(path.read_text(encoding="utf-8"), name=f"file:{path}")


def resolve_lagset(spec) -> LagSet:
    """Turn ``first|first2|se|onsite|file:PATH`` or a lag sequence into a LagSet."""
    if isinstance(spec, LagSet):
        return spec
    if isinstance(spec, str):
        if spec.startswith("file:"):
            return load_lagset(spec[5:])
        try:
            return PRESETS[spec.lower()]
        except KeyError:
            raise SsirError(f"unknown lag set {spec!r}") from None
    return LagSet(tuple(spec))


@dataclass(frozen=True)
class LaggedMoment:
    lag: Lag
    M: np.ndarray
    n_valid: int


def _paired(xst: MultiField, labels: np.ndarray, lag) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = labels.shape
    k, l = lag
    if abs(k) >= rows or abs(l) >= cols:
        raise SsirError(f"lag {tuple(lag)} does not fit a {rows}x{cols} grid")
    # response cells (i, j) whose partner (i+k, j+l) lies in the grid
    i0, i1 = max(0, -k), min(rows, rows - k)
    j0, j1 = max(0, -l), min(cols, cols - l)
    X = xst.values[i0 + k:i1 + k, j0 + l:j1 + l].reshape(-1, xst.p)
    lab = labels[i0:i1, j0:j1].ravel()
    return X, lab


def lagged_moment(xst: MultiField, slices: SliceAssignment, lag) -> LaggedMoment:
    """Sliced estimate of Cov(E(x[i+k, j+l] | slice of y[i, j]))."""
    if slices.shape.rows != xst.shape.rows or slices.shape.cols != xst.shape.cols:
        raise SsirError("field and slice assignment are on different grids")
    lag = Lag(*lag)
    X, lab = _paired(xst, slices.labels, lag)
    n = X.shape[0]
    counts = np.bincount(lab, minlength=slices.H).astype(float)
    sums = np.column_stack(
        [np.bincount(lab, weights=X[:, c], minlength=slices.H) for c in range(xst.p)]
    )
    used = counts > 0
    means = sums[used] / counts[used, None]
    centered = means - X.mean(axis=0)
    weights = counts[used] / n
    M = sym((centered * weights[:, None]).T @ centered)
    return LaggedMoment(lag, M, n)


def lagged_moments(xst: MultiField, slices: SliceAssignment, lagset) -> list[LaggedMoment]:
    return [lagged_moment(xst, slices, lag) for lag in resolve_lagset(lagset)]

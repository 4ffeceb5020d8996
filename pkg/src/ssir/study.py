"""Monte-Carlo driver: simulate, fit, select and score many replicates.

Replicate ``r`` of every (model, dependence) cell uses seed ``base_seed + r``.
All lag sets of a replicate are fitted to the same simulated field.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import SsirError
from .estimator import select, ssir_fit
from .grid import GridShape
from .metrics import weighted_distance
from .moments import resolve_lagset
from .simulate import DEPENDENCE, MODELS, ExpCovParams, SimSpec, simulate_model

log = logging.getLogger(__name__)

CSV_COLUMNS = ["model", "dependence", "lagset", "rep", "seed", "P", "d_hat",
               "D2_inverse", "D2_invsqrt", "n_cells", "n_lags"]
MAX_FAILURE_RATE = 0.05


class StudyAborted(SsirError):
    pass


@dataclass(frozen=True)
class StudyConfig:
    models: tuple = ("A",)
    dependence: tuple = ("weak",)
    lagsets: tuple = ("first",)
    reps: int = 50
    base_seed: int = 0
    P_values: tuple = (0.5, 0.8)
    H: int = 10
    shape: GridShape = GridShape(100, 100, 0.25)
    known_d_mode: bool = True
    estimated_d_mode: bool = True
    C0: float = 1.0
    C1: float = 1.0
    noise_sd: float = 1.0
    lambda_power: int = 1
    workers: int = 1

    def __post_init__(self):
        if int(self.reps) != self.reps or self.reps < 1:
            raise SsirError("reps must be a positive integer")
        for m in self.models:
            if m not in MODELS:
                raise SsirError(f"unknown model {m!r}")
        for dep in self.dependence:
            if dep not in DEPENDENCE:
                raise SsirError(f"dependence must be weak or strong, got {dep!r}")
        for ls in self.lagsets:
            resolve_lagset(ls)
        for P in self.P_values:
            if not 0 < P < 1:
                raise SsirError(f"P must lie in (0, 1), got {P}")
        if not (self.models and self.dependence and self.lagsets):
            raise SsirError("models, dependence and lagsets must be non-empty")
        if not (self.known_d_mode or self.estimated_d_mode):
            raise SsirError("enable at least one of known_d_mode and estimated_d_mode")


def _quantiles(values) -> dict:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return {}
    q = np.percentile(v, [0, 25, 50, 75, 100])
    return dict(zip(["min", "q1", "median", "q3", "max"], map(float, q)))


@dataclass
class StudySummary:
    config: StudyConfig
    rows: list
    failures: list = field(default_factory=list)
    cells: dict = field(default_factory=dict)

    def select_rows(self, **match) -> list:
        return [r for r in self.rows if all(r[k] == v for k, v in match.items())]

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        cfg["shape"] = asdict(self.config.shape)
        return {"config": cfg, "cells": self.cells, "failures": self.failures}

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
            w.writeheader()
            for r in self.rows:
                w.writerow({k: repr(r[k]) if isinstance(r[k], float) else r[k]
                            for k in CSV_COLUMNS})

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")


def _run_rep(config: StudyConfig, model: str, dep: str, rep: int):
    seed = config.base_seed + rep
    spec = SimSpec(model=model, shape=config.shape,
                   params=ExpCovParams(config.C0, config.C1, DEPENDENCE[dep]),
                   noise_sd=config.noise_sd, seed=seed)
    rows, failures = [], []
    try:
        sim = simulate_model(spec)
    except SsirError as exc:
        return rows, [dict(model=model, dependence=dep, lagset=ls, rep=rep, seed=seed,
                           error=str(exc)) for ls in config.lagsets]
    truth = sim.truth_basis()
    base = dict(model=model, dependence=dep, rep=rep, seed=seed)

    for ls in config.lagsets:
        try:
            fit = ssir_fit(sim.x, sim.y, ls, H=config.H, lambda_power=config.lambda_power)
        except SsirError as exc:
            failures.append(dict(base, lagset=ls, error=str(exc)))
            continue
        if config.known_d_mode:
            B = fit.directions(sim.d)
            rows.append(dict(base, lagset=ls, P="known", d_hat=sim.d,
                             D2_inverse=weighted_distance(B, truth, "inverse"),
                             D2_invsqrt=weighted_distance(B, truth, "inverse_sqrt"),
                             n_cells="", n_lags=""))
        if config.estimated_d_mode:
            for P in config.P_values:
                sel = select(fit, P)
                B = fit.Gamma[list(sel.components)]
                rows.append(dict(base, lagset=ls, P=repr(float(P)), d_hat=sel.d_hat,
                                 D2_inverse=weighted_distance(B, truth, "inverse"),
                                 D2_invsqrt=weighted_distance(B, truth, "inverse_sqrt"),
                                 n_cells=len(sel.selected_cells),
                                 n_lags=len(sel.selected_lags)))
    return rows, failures


def _run_rep_args(args):
    return _run_rep(*args)


def _summarize(config: StudyConfig, rows: list) -> dict:
    cells = {}
    groups = {}
    for r in rows:
        groups.setdefault((r["model"], r["dependence"], r["lagset"], r["P"]), []).append(r)
    for (model, dep, ls, P), grp in groups.items():
        freq = {}
        for r in grp:
            freq[str(r["d_hat"])] = freq.get(str(r["d_hat"]), 0) + 1
        cells[f"{model}/{dep}/{ls}/{P}"] = {
            "model": model, "dependence": dep, "lagset": ls, "P": P,
            "n": len(grp),
            "D2_inverse": _quantiles([r["D2_inverse"] for r in grp]),
            "D2_invsqrt": _quantiles([r["D2_invsqrt"] for r in grp]),
            "d_hat_freq": dict(sorted(freq.items())),
        }
    return cells


def run_study(config: StudyConfig, workers: int | None = None) -> StudySummary:
    """Run every (model, dependence, lagset) cell for ``config.reps`` replicates.

    Results do not depend on ``workers``: each replicate draws from its own
    seed and rows are assembled in task order.
    """
    workers = config.workers if workers is None else workers
    tasks = [(config, m, dep, rep)
             for m in config.models for dep in config.dependence
             for rep in range(config.reps)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_rep_args, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_run_rep(*t) for t in tasks]

    rows, failures = [], []
    for r, f in results:
        rows.extend(r)
        failures.extend(f)
    for f in failures:
        log.warning("rep %(rep)s of %(model)s/%(dependence)s/%(lagset)s failed: %(error)s", f)

    n_units = len(tasks) * len(config.lagsets)
    if len(failures) > MAX_FAILURE_RATE * n_units:
        raise StudyAborted(
            f"{len(failures)} of {n_units} fits failed (limit {MAX_FAILURE_RATE:.0%})"
        )
    return StudySummary(config=config, rows=rows, failures=failures,
                        cells=_summarize(config, rows))

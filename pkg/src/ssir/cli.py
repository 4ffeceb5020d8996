"""Command-line interface: ``ssir simulate|fit|eval|replicate``.

Exit codes: 0 success, 1 invalid option value, 2 unreadable input (or
argparse usage error), 3 degenerate response, 4 covariance not positive
definite, 5 rank or dimension mismatch, 6 replicate study aborted.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from .errors import (DegenerateResponseError, NotPositiveDefiniteError, RankError,
                     SsirError)
from .estimator import select, ssir_fit
from .grid import GridShape
from .io import (FieldFormatError, fit_report, format_lambda_table, read_field,
                 truth_document, validate_report, write_field)
from .metrics import weighted_distance
from .moments import LagSet, resolve_lagset
from .simulate import DEPENDENCE, ExpCovParams, SimSpec, simulate_model
from .study import StudyAborted, StudyConfig, run_study

EXIT_INVALID, EXIT_INPUT, EXIT_DEGENERATE, EXIT_NOT_PD, EXIT_RANK, EXIT_ABORT = 1, 2, 3, 4, 5, 6


class CliError(Exception):
    def __init__(self, message, code=EXIT_INVALID):
        super().__init__(message)
        self.code = code


def _csv(conv):
    def parse(text):
        try:
            return [conv(t) for t in text.split(",") if t.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def cmd_simulate(args) -> int:
    if not args.h0 > 0:
        raise CliError("h0 must be positive")
    if not args.spacing > 0:
        raise CliError("spacing must be positive")
    if args.rows < 1 or args.cols < 1:
        raise CliError("rows and cols must be positive")
    if args.c0 < 0 or args.c1 < 0 or args.noise_sd < 0:
        raise CliError("c0, c1 and noise-sd must be non-negative")
    spec = SimSpec(model=args.model, shape=GridShape(args.rows, args.cols, args.spacing),
                   params=ExpCovParams(args.c0, args.c1, args.h0),
                   noise_sd=args.noise_sd, seed=args.seed)
    sim = simulate_model(spec)
    write_field(args.out, sim.x, sim.y, sim.meta)
    truth = truth_document(sim.truth, sim.meta)
    Path(f"{args.out}.truth.json").write_text(json.dumps(truth, indent=2) + "\n",
                                              encoding="utf-8")
    return 0


def cmd_fit(args) -> int:
    x, y, _ = read_field(args.input)
    try:
        lagset = resolve_lagset(args.lags)
    except OSError as exc:
        raise CliError(f"cannot read lag file: {exc}", EXIT_INPUT) from None
    for P in args.P:
        if not 0 < P < 1:
            raise CliError(f"P must lie in (0, 1), got {P}")
    fit = ssir_fit(x, y, lagset, H=args.slices, lambda_power=args.lambda_power)
    report = fit_report(fit, args.P)
    validate_report(report)
    Path(args.out).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    sys.stdout.write(format_lambda_table(fit.lam, fit.lag_order))
    return 0


def _load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_INPUT) from None


def cmd_eval(args) -> int:
    report = _load_json(args.fit)
    truth = _load_json(args.truth)
    gamma = np.asarray(report["gamma"], dtype=float)
    B_true = np.asarray(truth["directions"], dtype=float)
    if args.d.startswith("est:"):
        key = args.d[4:]
        try:
            P = float(key)
        except ValueError:
            raise CliError(f"bad --d value {args.d!r}") from None
        sel = report.get("selections", {}).get(repr(P))
        if sel is not None:
            comps = sorted({c["component"] for c in sel["selected_cells"]})
        else:
            view = SimpleNamespace(lam=np.asarray(report["lambda"], dtype=float),
                                   lag_order=LagSet(tuple(map(tuple, report["lagset"]))))
            comps = list(select(view, P).components)
        B = gamma[comps]
    else:
        try:
            d = int(args.d)
        except ValueError:
            raise CliError(f"bad --d value {args.d!r}") from None
        if not 1 <= d <= gamma.shape[0]:
            raise CliError(f"d={d} outside 1..{gamma.shape[0]}", EXIT_RANK)
        B = gamma[:d]
    weight = {"inverse": "inverse", "invsqrt": "inverse_sqrt"}[args.weight]
    print(f"{weighted_distance(B, B_true, weight):.10g}")
    return 0


def cmd_replicate(args) -> int:
    workers = int(os.environ.get("SSIR_WORKERS", args.workers))
    try:
        config = StudyConfig(models=tuple(args.models), dependence=tuple(args.dependence),
                             lagsets=tuple(args.lags), reps=args.reps, base_seed=args.seed,
                             P_values=tuple(args.P), H=args.slices,
                             shape=GridShape(args.rows, args.cols, args.spacing),
                             lambda_power=args.lambda_power, workers=workers)
    except SsirError as exc:
        raise CliError(str(exc)) from None
    summary = run_study(config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary.write_csv(out / "raw.csv")
    summary.write_json(out / "summary.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssir", description="Spatial sliced inverse regression")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate model A, B or C to a field file")
    s.add_argument("--model", choices=["A", "B", "C"], required=True)
    s.add_argument("--rows", type=int, default=100)
    s.add_argument("--cols", type=int, default=100)
    s.add_argument("--spacing", type=float, default=0.25)
    s.add_argument("--h0", type=float, default=DEPENDENCE["weak"])
    s.add_argument("--c0", type=float, default=1.0)
    s.add_argument("--c1", type=float, default=1.0)
    s.add_argument("--noise-sd", type=float, default=1.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fit", help="fit SSIR to a field file")
    f.add_argument("--input", required=True)
    f.add_argument("--lags", default="first", help="first|first2|se|onsite|file:PATH")
    f.add_argument("--slices", type=int, default=10)
    f.add_argument("--P", type=_csv(float), default=[0.5, 0.8])
    f.add_argument("--lambda-power", type=int, choices=[1, 2], default=1)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("eval", help="distance between a fit and the true subspace")
    e.add_argument("--fit", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--d", required=True, help="integer d, or est:P")
    e.add_argument("--weight", choices=["inverse", "invsqrt"], default="inverse")
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("replicate", help="run the Monte-Carlo study")
    r.add_argument("--models", type=_csv(str), default=["A"])
    r.add_argument("--dependence", type=_csv(str), default=["weak"])
    r.add_argument("--lags", type=_csv(str), default=["first"])
    r.add_argument("--reps", type=int, default=50)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--P", type=_csv(float), default=[0.5, 0.8])
    r.add_argument("--slices", type=int, default=10)
    r.add_argument("--rows", type=int, default=100)
    r.add_argument("--cols", type=int, default=100)
    r.add_argument("--spacing", type=float, default=0.25)
    r.add_argument("--lambda-power", type=int, choices=[1, 2], default=1)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--out-dir", required=True)
    r.set_defaults(func=cmd_replicate)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except FieldFormatError as exc:
        code, msg = EXIT_INPUT, str(exc)
    except DegenerateResponseError as exc:
        code, msg = EXIT_DEGENERATE, str(exc)
    except NotPositiveDefiniteError as exc:
        code, msg = EXIT_NOT_PD, str(exc)
    except RankError as exc:
        code, msg = EXIT_RANK, str(exc)
    except StudyAborted as exc:
        code, msg = EXIT_ABORT, str(exc)
    except SsirError as exc:
        code, msg = EXIT_INVALID, str(exc)
    print(f"ssir {args.command}: error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

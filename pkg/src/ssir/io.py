"""Text field files, JSON fit reports and the printed lambda table.

Field file layout (UTF-8)::

    ssir-field v1
    <rows> <cols> <spacing> <p>
    # meta: {...}                      (optional)
    x_1 ... x_p y                      (rows*cols lines, row-major)

Values are written with 17 significant digits so a read reproduces every
double exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import numpy as np

from .errors import SsirError
from .estimator import SsirFit, select
from .grid import GridShape, MultiField, ScalarField

MAGIC = "ssir-field v1"


class FieldFormatError(SsirError):
    pass


def _num(v: float) -> str:
    return format(float(v), ".17g")


def format_field(x: MultiField, y: ScalarField, meta: dict | None = None) -> str:
    if (x.shape.rows, x.shape.cols) != (y.shape.rows, y.shape.cols):
        raise SsirError("covariate and response fields are on different grids")
    s = x.shape
    lines = [MAGIC, f"{s.rows} {s.cols} {float(s.spacing)!r} {x.p}"]
    if meta is not None:
        lines.append("# meta: " + json.dumps(meta, sort_keys=True))
    data = np.column_stack([x.cells(), y.values.ravel()])
    lines.extend(" ".join(map(_num, row)) for row in data)
    return "\n".join(lines) + "\n"


def write_field(path, x: MultiField, y: ScalarField, meta: dict | None = None) -> None:
    Path(path).write_text(format_field(x, y, meta), encoding="utf-8")


def parse_field(text: str) -> tuple[MultiField, ScalarField, dict]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise FieldFormatError(f"not a field file: first line must be {MAGIC!r}")
    try:
        rows, cols, spacing, p = lines[1].split()
        shape = GridShape(int(rows), int(cols), float(spacing))
        p = int(p)
    except (IndexError, ValueError) as exc:
        raise FieldFormatError(f"bad header line: {exc}") from None
    body = lines[2:]
    meta = {}
    if body and body[0].startswith("#"):
        head = body.pop(0)
        if head.startswith("# meta:"):
            try:
                meta = json.loads(head[len("# meta:"):])
            except ValueError as exc:
                raise FieldFormatError(f"bad meta line: {exc}") from None
    body = [ln for ln in body if ln.strip()]
    if len(body) != shape.size:
        raise FieldFormatError(f"expected {shape.size} data lines, found {len(body)}")
    try:
        data = np.array([[float(t) for t in ln.split()] for ln in body])
    except ValueError as exc:
        raise FieldFormatError(f"bad data value: {exc}") from None
    if data.shape != (shape.size, p + 1):
        raise FieldFormatError(f"data lines must hold {p + 1} values each")
    if not np.all(np.isfinite(data)):
        raise FieldFormatError("data values must be finite")
    x = MultiField(shape, data[:, :p].reshape(shape.rows, shape.cols, p))
    y = ScalarField(shape, data[:, p].reshape(shape.rows, shape.cols))
    return x, y, meta


def read_field(path) -> tuple[MultiField, ScalarField, dict]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FieldFormatError(f"cannot read {path}: {exc}") from None
    return parse_field(text)


def truth_document(truth, meta: dict | None = None) -> dict:
    doc = {
        "d": len(truth),
        "directions": [list(map(float, v)) for v, _ in truth],
        "lags": [[int(lag[0]), int(lag[1])] for _, lag in truth],
    }
    if meta:
        doc["model"] = meta.get("model")
    return doc


_matrix = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_vector = {"type": "array", "items": {"type": "number"}}
_lag = {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}

FIT_REPORT_SCHEMA = {
    "type": "object",
    "required": ["p", "H", "lagset", "mean", "cov_inv_sqrt", "U", "gamma",
                 "lambda", "row_sums", "jad", "selections"],
    "properties": {
        "p": {"type": "integer", "minimum": 1},
        "H": {"type": "integer", "minimum": 2},
        "lagset": {"type": "array", "items": _lag, "minItems": 1},
        "mean": _vector,
        "cov_inv_sqrt": _matrix,
        "U": _matrix,
        "gamma": _matrix,
        "lambda": _matrix,
        "row_sums": _vector,
        "lambda_power": {"enum": [1, 2]},
        "jad": {
            "type": "object",
            "required": ["off_sum", "sweeps", "converged"],
            "properties": {
                "off_sum": {"type": "number", "minimum": 0},
                "sweeps": {"type": "integer", "minimum": 0},
                "converged": {"type": "boolean"},
            },
        },
        "selections": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["d_hat", "selected_cells", "selected_lags"],
                "properties": {
                    "d_hat": {"type": "integer", "minimum": 1},
                    "selected_cells": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["component", "lag", "lambda"],
                            "properties": {
                                "component": {"type": "integer", "minimum": 0},
                                "lag": _lag,
                                "lambda": {"type": "number", "minimum": 0},
                            },
                        },
                    },
                    "selected_lags": {"type": "array", "items": _lag},
                },
            },
        },
    },
}


def validate_report(doc: dict) -> None:
    """Check a fit report against the schema and its numeric invariants."""
    jsonschema.validate(doc, FIT_REPORT_SCHEMA)
    p, K = doc["p"], len(doc["lagset"])
    lam = np.asarray(doc["lambda"], dtype=float)
    if lam.shape != (p, K):
        raise jsonschema.ValidationError(f"lambda must be {p}x{K}, got {lam.shape}")
    for key in ("cov_inv_sqrt", "U", "gamma"):
        if np.asarray(doc[key]).shape != (p, p):
            raise jsonschema.ValidationError(f"{key} must be {p}x{p}")
    if abs(lam.sum() - 1.0) > 1e-10 or lam.min() < 0:
        raise jsonschema.ValidationError("lambda must be non-negative and sum to 1")


def fit_report(fit: SsirFit, P_values=(0.5, 0.8)) -> dict:
    selections = {}
    for P in P_values:
        sel = select(fit, P)
        selections[repr(float(P))] = {
            "d_hat": sel.d_hat,
            "selected_cells": [
                {"component": c, "lag": [lag.k, lag.l],
                 "lambda": float(fit.lam[c, fit.lag_order.index(lag)])}
                for c, lag in sel.selected_cells
            ],
            "selected_lags": [[lag.k, lag.l] for lag in sel.selected_lags],
        }
    return {
        "p": fit.p,
        "H": fit.H,
        "lagset": fit.lag_order.as_list(),
        "lambda_power": fit.lambda_power,
        "mean": fit.mean.tolist(),
        "cov_inv_sqrt": fit.cov_inv_sqrt.tolist(),
        "U": fit.U.tolist(),
        "gamma": fit.Gamma.tolist(),
        "lambda": fit.lam.tolist(),
        "row_sums": fit.row_sums.tolist(),
        "jad": {"off_sum": fit.jad.off_sum, "sweeps": fit.jad.sweeps,
                "converged": bool(fit.jad.converged)},
        "selections": selections,
    }


def format_lambda_table(lam, lagset, digits: int = 4) -> str:
    """Lag rows, component columns, with row and column sums."""
    lam = np.asarray(lam, dtype=float)
    p, K = lam.shape
    w = digits + 3
    head = f"{'k':>3} {'l':>3} |" + "".join(f" {'u' + str(c + 1):>{w}}" for c in range(p))
    head += f" | {'Sum':>{w}}"
    out = [head, "-" * len(head)]
    for j, (k, l) in enumerate(lagset):
        cells = "".join(f" {v:>{w}.{digits}f}" for v in lam[:, j])
        out.append(f"{k:>3} {l:>3} |{cells} | {lam[:, j].sum():>{w}.{digits}f}")
    out.append("-" * len(head))
    sums = "".join(f" {v:>{w}.{digits}f}" for v in lam.sum(axis=1))
    out.append(f"{'Sum':>7} |{sums} | {lam.sum():>{w}.{digits}f}")
    return "\n".join(out) + "\n"


def parse_lambda_table(text: str) -> tuple[np.ndarray, list]:
    """Inverse of :func:`format_lambda_table`, up to print precision."""
    lags, cols = [], []
    for line in text.splitlines()[2:]:
        if not line.strip() or line.startswith("-") or line.lstrip().startswith("Sum"):
            continue
        left, mid, _ = line.split("|")
        k, l = map(int, left.split())
        lags.append((k, l))
        cols.append([float(t) for t in mid.split()])
    return np.array(cols).T, lags

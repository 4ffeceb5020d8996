import json

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssir.estimator import ssir_fit
from ssir.grid import GridShape, MultiField, ScalarField
from ssir.io import (FieldFormatError, fit_report, format_field, format_lambda_table,
                     parse_field, parse_lambda_table, read_field, validate_report,
                     write_field)
from ssir.moments import FIRST

from conftest import random_fields, simulated

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(rows=st.integers(1, 4), cols=st.integers(1, 4), p=st.integers(1, 3),
       spacing=st.floats(1e-3, 1e3), data=st.data())
def test_field_roundtrip_bit_exact(rows, cols, p, spacing, data):
    vals = data.draw(st.lists(finite, min_size=rows * cols * (p + 1),
                              max_size=rows * cols * (p + 1)))
    arr = np.array(vals).reshape(rows, cols, p + 1)
    shape = GridShape(rows, cols, spacing)
    x, y = MultiField(shape, arr[..., :p]), ScalarField(shape, arr[..., p])
    x2, y2, meta = parse_field(format_field(x, y, {"seed": 1}))
    assert x2.shape == shape and meta == {"seed": 1}
    assert x2.values.tobytes() == x.values.tobytes()
    assert y2.values.tobytes() == y.values.tobytes()


def test_field_layout(tmp_path):
    shape = GridShape(2, 2, 0.5)
    x = MultiField(shape, np.arange(8.0).reshape(2, 2, 2))
    y = ScalarField(shape, np.array([[10.0, 11.0], [12.0, 13.0]]))
    write_field(tmp_path / "f", x, y)
    lines = (tmp_path / "f").read_text().splitlines()
    assert lines[:3] == ["ssir-field v1", "2 2 0.5 2", "0 1 10"]
    assert lines[-1] == "6 7 13"
    x2, y2, meta = read_field(tmp_path / "f")
    assert meta == {}


@pytest.mark.parametrize("text", [
    "",
    "ssir-field v2\n1 1 1.0 1\n0 0\n",
    "ssir-field v1\n1 1\n0 0\n",
    "ssir-field v1\n1 2 1.0 1\n0 0\n",
    "ssir-field v1\n1 1 1.0 1\n0 x\n",
    "ssir-field v1\n1 1 1.0 1\n0 0 0\n",
    "ssir-field v1\n1 1 1.0 1\n# meta: {bad\n0 0\n",
    "ssir-field v1\n1 1 1.0 1\nnan 0\n",
])
def test_malformed_fields(text):
    with pytest.raises(FieldFormatError):
        parse_field(text)


def test_missing_file(tmp_path):
    with pytest.raises(FieldFormatError):
        read_field(tmp_path / "absent")


def test_report_valid_and_table_roundtrip():
    sim = simulated("A", 0.25, 1, 60)
    fit = ssir_fit(sim.x, sim.y, "first")
    doc = fit_report(fit, (0.5, 0.8))
    validate_report(json.loads(json.dumps(doc)))
    assert set(doc["selections"]) == {"0.5", "0.8"}
    top = doc["selections"]["0.5"]["selected_cells"][0]
    assert top["component"] == 0 and top["lag"] == [1, 0]

    table = format_lambda_table(fit.lam, fit.lag_order)
    assert table.splitlines()[0].split()[:3] == ["k", "l", "|"]
    lam, lags = parse_lambda_table(table)
    assert lags == list(FIRST.lags)
    np.testing.assert_allclose(lam, fit.lam, atol=5e-5)


def test_report_invariants_enforced():
    sim = simulated("A", 0.25, 1, 40)
    doc = fit_report(ssir_fit(sim.x, sim.y, "se"))
    bad = json.loads(json.dumps(doc))
    bad["lambda"][0][0] += 0.1
    with pytest.raises(jsonschema.ValidationError):
        validate_report(bad)
    bad = json.loads(json.dumps(doc))
    del bad["jad"]
    with pytest.raises(jsonschema.ValidationError):
        validate_report(bad)
    bad = json.loads(json.dumps(doc))
    bad["U"] = bad["U"][:2]
    with pytest.raises(jsonschema.ValidationError):
        validate_report(bad)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.integers(1, 5),
       lagset=st.sampled_from(["first", "first2", "se", "onsite"]), H=st.integers(2, 8))
def test_reports_from_random_inputs_validate(seed, p, lagset, H):
    rng = np.random.default_rng(seed)
    x, y = random_fields(rng, 12, 11, p)
    doc = fit_report(ssir_fit(x, y, lagset, H=H), (0.3, 0.9))
    validate_report(json.loads(json.dumps(doc)))

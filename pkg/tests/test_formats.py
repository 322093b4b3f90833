import json
import re

import numpy as np
import pytest

from opgraph.formats import FormatError, loads, matrix_from_json, matrix_to_json


def test_matrix_round_trip_dyadic():
    m = np.array([[0.5, -1.25 + 0.75j], [3.0j, 2.0 ** -20]])
    text = json.dumps(matrix_to_json(m))
    back = matrix_from_json(loads(text))
    assert np.array_equal(back, m)


def test_matrix_layout_is_row_major():
    m = np.array([[1, 2], [3, 4]], dtype=complex)
    obj = matrix_to_json(m)
    assert obj["rows"] == 2 and obj["cols"] == 2
    assert obj["data"] == [[1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [4.0, 0.0]]


def test_rejects_nan_token():
    with pytest.raises(FormatError):
        loads('{"rows": 1, "cols": 1, "data": [[NaN, 0]]}')


@pytest.mark.parametrize(
    "obj, field",
    [
        ({"rows": 0, "cols": 1, "data": []}, "rows"),
        ({"rows": 1, "cols": 1, "data": [[1, 0], [2, 0]]}, "data"),
        ({"rows": 1, "cols": 1, "data": [[1]]}, "data[0]"),
        ({"rows": 1, "cols": 1, "data": [["a", 0]]}, "data[0]"),
        ({"rows": 1, "cols": 1, "data": [[1e400, 0]]}, "data[0]"),
    ],
)
def test_malformed_matrix_names_field(obj, field):
    with pytest.raises(FormatError, match=re.escape(f"field '{field}'")):
        matrix_from_json(obj)

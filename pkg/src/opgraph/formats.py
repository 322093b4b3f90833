"""JSON wire formats.

Matrices are ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` in row-major
order. NaN and infinities are rejected on load.
"""

import json
import math
import os
import tempfile

import numpy as np

from .core import OpGraphError

__all__ = [
    "FormatError",
    "matrix_to_json",
    "matrix_from_json",
    "loads",
    "dumps",
    "load_json",
    "write_text_atomic",
]


class FormatError(OpGraphError, ValueError):
    pass


def _reject_constant(name):
    raise FormatError(f"non-finite JSON constant {name!r} is not allowed")


def loads(text):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def dumps(obj, indent=None):
    return json.dumps(obj, indent=indent, allow_nan=False)


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def write_text_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def matrix_to_json(m):
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    flat = m.reshape(-1)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def _positive_int(obj, key, where):
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise FormatError(f"{where}: field {key!r} must be a positive integer, got {v!r}")
    return v


def matrix_from_json(obj, where="matrix"):
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object, got {type(obj).__name__}")
    rows = _positive_int(obj, "rows", where)
    cols = _positive_int(obj, "cols", where)
    data = obj.get("data")
    if not isinstance(data, list):
        raise FormatError(f"{where}: field 'data' must be a list")
    if len(data) != rows * cols:
        raise FormatError(f"{where}: field 'data' has {len(data)} entries, expected {rows * cols}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, pair in enumerate(data):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in pair)
        ):
            raise FormatError(f"{where}: field 'data[{i}]' must be a [re, im] pair of numbers")
        re, im = float(pair[0]), float(pair[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise FormatError(f"{where}: field 'data[{i}]' is not finite")
        out[i] = complex(re, im)
    return out.reshape(rows, cols)

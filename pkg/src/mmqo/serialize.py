"""Deterministic JSON/CSV serialization helpers.

Floats are always rendered with 17 significant digits so identical inputs
produce byte-identical outputs. Complex scalars/vectors/matrices serialize
as [re, im] pairs, row-major.
"""

import json

import numpy as np

from .errors import InvalidParam
from .gaussian import GaussianState


def fmt_float(x):
    x = float(x)
    if x != x or x in (float("inf"), float("-inf")):
        raise InvalidParam("non-finite value cannot be serialized", value=repr(x))
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return format(x, ".17g")


def dumps(obj, indent=0):
    """JSON text with fixed float formatting (insertion-ordered dicts)."""
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            '%s  %s: %s' % (pad, json.dumps(str(k)), dumps(v, indent + 2))
            for k, v in obj.items())
        return "{\n%s\n%s}" % (items, pad)
    if isinstance(obj, (list, tuple)):
        flat = all(not isinstance(v, (dict, list, tuple)) for v in obj)
        if flat:
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = ",\n".join("%s  %s" % (pad, dumps(v, indent + 2)) for v in obj)
        return "[\n%s\n%s]" % (items, pad)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag])
    if isinstance(obj, np.ndarray):
        return dumps(array_to_json(obj))
    return json.dumps(obj)


def array_to_json(arr):
    arr = np.asarray(arr)
    if np.iscomplexobj(arr):
        if arr.ndim == 0:
            return [float(arr.real), float(arr.imag)]
        return [array_to_json(row) for row in arr]
    if arr.ndim == 0:
        return float(arr)
    return [array_to_json(row) for row in arr]


def _entry_to_complex(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise InvalidParam("complex entries must be [re, im] pairs",
                               entry=v)
        return complex(float(v[0]), float(v[1]))
    return complex(float(v), 0.0)


def json_to_cvec(data):
    return np.array([_entry_to_complex(v) for v in data], dtype=complex)


def json_to_cmat(data):
    return np.array([[_entry_to_complex(v) for v in row] for row in data],
                    dtype=complex)


def json_to_rmat(data):
    return np.array(data, dtype=float)


def state_to_json(st):
    return {
        "n_modes": st.n_modes,
        "mean": array_to_json(st.mean),
        "cov": array_to_json(st.cov),
    }


def json_to_state(data):
    cov = np.array(data["cov"], dtype=float)
    mean = np.array(data.get("mean", np.zeros(cov.shape[0])), dtype=float)
    st = GaussianState(mean=mean, cov=cov)
    if "n_modes" in data and int(data["n_modes"]) != st.n_modes:
        raise InvalidParam("declared n_modes does not match the covariance",
                           declared=int(data["n_modes"]), actual=st.n_modes)
    return st


def csv_lines(header, rows):
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, str):
                cells.append(v)
            elif isinstance(v, (bool, np.bool_)):
                cells.append("true" if v else "false")
            elif isinstance(v, (int, np.integer)):
                cells.append(str(int(v)))
            else:
                cells.append(fmt_float(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"

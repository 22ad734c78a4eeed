"""JSON file format for states and matrices, plus trace writers.

Matrix/state files look like ``{"dim": N, "data": [[re, im], ...]}``; the
data is row-major for an ``N x N`` matrix (``N*N`` pairs) and flat for a
state (``N`` pairs).
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .errors import DimensionError

TRACE_FIELDS = ("m", "c1", "c2", "p_reduced", "p_full", "deviation")


def _pairs(values: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in values.reshape(-1)]


def _unpairs(data, expected: int, what: str) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DimensionError(f"{what} data must be a list of [re, im] pairs")
    if arr.shape[0] != expected:
        raise DimensionError(f"{what} data has {arr.shape[0]} entries, expected {expected}")
    return arr[:, 0] + 1j * arr[:, 1]


def read_payload(path) -> tuple[int, list]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        return int(doc["dim"]), doc["data"]
    except (KeyError, TypeError) as exc:
        raise DimensionError(f"{path}: expected an object with 'dim' and 'data'") from exc


def load_matrix_array(path) -> np.ndarray:
    dim, data = read_payload(path)
    return _unpairs(data, dim * dim, "matrix").reshape(dim, dim)


def load_state_array(path) -> np.ndarray:
    dim, data = read_payload(path)
    return _unpairs(data, dim, "state")


def save_matrix(path, matrix) -> None:
    mat = np.asarray(matrix, dtype=np.complex128)
    Path(path).write_text(json.dumps({"dim": mat.shape[0], "data": _pairs(mat)}), encoding="utf-8")


def save_state(path, amplitudes) -> None:
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    Path(path).write_text(json.dumps({"dim": amps.size, "data": _pairs(amps)}), encoding="utf-8")


def fmt(x) -> str:
    """17 significant digits (round-trips a double); blank for missing."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def rows_to_csv(fields, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([fmt(row.get(f)) if not isinstance(row.get(f), str) else row[f] for f in fields])
    return buf.getvalue()


def rows_to_json(rows, metadata: dict) -> str:
    return json.dumps({"metadata": metadata, "rows": list(rows)}, indent=2, sort_keys=True) + "\n"

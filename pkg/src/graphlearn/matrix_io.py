"""Plain-text matrix serialization (CSV and a small JSON envelope)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = ["load_matrix", "read_csv", "read_json", "save_matrix", "write_csv", "write_json"]


def write_csv(path, mat) -> None:
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    # %.17g round-trips every double exactly
    np.savetxt(path, mat, delimiter=",", fmt="%.17g")


def read_csv(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float, ndmin=2))


def write_json(path, mat) -> None:
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    payload = {"rows": mat.shape[0], "cols": mat.shape[1], "data": mat.ravel(order="C").tolist()}
    Path(path).write_text(json.dumps(payload))


def read_json(path) -> np.ndarray:
    payload = json.loads(Path(path).read_text())
    try:
        rows, cols, data = int(payload["rows"]), int(payload["cols"]), payload["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: expected keys 'rows', 'cols', 'data'") from exc
    if len(data) != rows * cols:
        raise ValueError(f"{path}: data has {len(data)} values, expected {rows * cols}")
    return np.asarray(data, dtype=float).reshape(rows, cols)


def save_matrix(path, mat) -> None:
    """Write ``mat`` as JSON when the suffix is ``.json``, CSV otherwise."""
    if Path(path).suffix.lower() == ".json":
        write_json(path, mat)
    else:
        write_csv(path, mat)


def load_matrix(path) -> np.ndarray:
    if Path(path).suffix.lower() == ".json":
        return read_json(path)
    return read_csv(path)

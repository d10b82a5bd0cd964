"""CSV readers and writers for data matrices, label matrices and partitions."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

__all__ = [
    "DataFileError",
    "read_data_csv",
    "read_label_csv",
    "write_label_csv",
    "write_matrix_csv",
    "read_matrix_csv",
    "write_json",
]


class DataFileError(ValueError):
    """Malformed input file; the message names the offending line."""


def _rows(path):
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataFileError(f"{path}: cannot read ({exc.strerror})") from exc
    if not rows:
        raise DataFileError(f"{path}: file is empty")
    return path, rows


def _is_numeric_row(row) -> bool:
    try:
        [float(c) for c in row]
    except ValueError:
        return False
    return True


def _parse(path, rows, conv, what):
    # A non-numeric first row is taken as a header.
    if not _is_numeric_row(rows[0][1]):
        rows = rows[1:]
    if not rows:
        raise DataFileError(f"{path}: no data rows")
    width = len(rows[0][1])
    out = []
    for lineno, row in rows:
        if len(row) != width:
            raise DataFileError(f"{path}:{lineno}: expected {width} fields, found {len(row)}")
        try:
            out.append([conv(c) for c in row])
        except ValueError as exc:
            raise DataFileError(f"{path}:{lineno}: {what}: {exc}") from None
    return out


def _to_int(cell: str) -> int:
    s = cell.strip()
    try:
        return int(s)
    except ValueError:
        v = float(s)
        if not v.is_integer():
            raise ValueError(f"non-integer label {cell!r}") from None
        return int(v)


def _to_float(cell: str) -> float:
    v = float(cell.strip())
    if not np.isfinite(v):
        raise ValueError(f"non-finite value {cell!r}")
    return v


def read_data_csv(path, truth_column: bool = False):
    """Read an ``n x d`` feature matrix.

    With ``truth_column`` the last column is split off as integer labels and
    ``(X, labels)`` is returned; otherwise ``(X, None)``.
    """
    path, rows = _rows(path)
    values = _parse(path, rows, _to_float, "non-numeric value")
    X = np.asarray(values, dtype=float)
    if X.shape[0] < 2:
        raise DataFileError(f"{path}: need at least 2 samples, found {X.shape[0]}")
    if not truth_column:
        return X, None
    if X.shape[1] < 2:
        raise DataFileError(f"{path}: truth column requested but only one column present")
    y = X[:, -1]
    if np.any(y != np.round(y)):
        raise DataFileError(f"{path}: truth column holds non-integer values")
    return X[:, :-1], y.astype(np.int64)


def read_label_csv(path, transposed: bool = False) -> np.ndarray:
    """Read a label matrix (rows = samples) or a single label column."""
    path, rows = _rows(path)
    labels = np.asarray(_parse(path, rows, _to_int, "bad label"), dtype=np.int64)
    if transposed:
        labels = labels.T
    if np.any(labels < 0):
        raise DataFileError(f"{path}: labels must be non-negative")
    return labels


def write_label_csv(path, labels, header: list[str] | None = None) -> None:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim == 1:
        labels = labels[:, None]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(header)
        w.writerows(labels.tolist())


def write_matrix_csv(path, matrix) -> None:
    np.savetxt(path, np.asarray(matrix, dtype=float), delimiter=",", fmt="%.17g")


def read_matrix_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")

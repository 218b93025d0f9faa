"""Reading point files and writing clustering results.

Text output uses ``repr`` for floats (shortest round-trip form), so a
``write_points`` / ``read_points`` cycle reproduces coordinates exactly
and files are byte-identical for identical results, regardless of locale.
"""

from __future__ import annotations

import math
import os
import struct
from pathlib import Path

import numpy as np

from .geometry import PointSet, UsageError, as_pointset

BINARY_MAGIC = b"PDPCPTS1"
_HEADER = struct.Struct("<8sQQ")


class PointFileError(UsageError):
    """Malformed point file; the message names the offending line."""


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def _parse_csv(lines, path) -> np.ndarray:
    rows: list[list[float]] = []
    d = None
    header_line = _first_line(lines)
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        toks = [t.strip() for t in line.split(",")]
        if lineno == header_line and not all(_is_number(t) for t in toks):
            continue
        try:
            vals = [float(t) for t in toks]
        except ValueError:
            raise PointFileError(f"{path}: line {lineno}: non-numeric value in {line!r}") from None
        if not all(math.isfinite(v) for v in vals):
            raise PointFileError(f"{path}: line {lineno}: non-finite value in {line!r}")
        if d is None:
            d = len(vals)
        elif len(vals) != d:
            raise PointFileError(
                f"{path}: line {lineno}: expected {d} columns, found {len(vals)}")
        rows.append(vals)
    if not rows:
        raise PointFileError(f"{path}: no points")
    return np.array(rows, dtype=np.float64)


def _first_line(lines) -> int:
    for lineno, raw in enumerate(lines, start=1):
        if raw.strip():
            return lineno
    return 0


def is_binary(path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(len(BINARY_MAGIC)) == BINARY_MAGIC


def read_points(path, fmt: str = "auto") -> PointSet:
    """Load points in file order (ids ``1..n``).

    Parameters
    ----------
    path : str or Path
    fmt : {"auto", "csv", "binary"}
        ``auto`` picks binary when the file starts with ``BINARY_MAGIC``.
        CSV may carry one header line, recognised as a non-numeric first row.

    Raises
    ------
    PointFileError
        On ragged rows, non-numeric or non-finite values, or an empty file.
    OSError
        When the file cannot be read.
    """
    path = Path(path)
    if fmt == "auto":
        fmt = "binary" if is_binary(path) else "csv"
    if fmt == "binary":
        return read_binary(path)
    if fmt != "csv":
        raise UsageError(f"unknown point format {fmt!r}")
    lines = path.read_text(encoding="utf-8").splitlines()
    return PointSet(_parse_csv(lines, path))


def write_points(path, points) -> None:
    ps = as_pointset(points)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in ps.coords.tolist():
            fh.write(",".join(map(repr, row)))
            fh.write("\n")


def write_binary(path, points) -> None:
    """Packed little-endian cache: magic, n, d, then n*d float64 values."""
    ps = as_pointset(points)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(BINARY_MAGIC, ps.n, ps.d))
        fh.write(ps.coords.astype("<f8").tobytes())


def read_binary(path) -> PointSet:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise PointFileError(f"{path}: truncated header")
        magic, n, d = _HEADER.unpack(head)
        if magic != BINARY_MAGIC:
            raise PointFileError(f"{path}: bad magic {magic!r}")
        data = np.fromfile(fh, dtype="<f8")
    if data.size != n * d:
        raise PointFileError(f"{path}: expected {n * d} values, found {data.size}")
    if not np.isfinite(data).all():
        raise PointFileError(f"{path}: non-finite value")
    return PointSet(data.reshape(n, d))


def dedup_points(points) -> tuple[PointSet, np.ndarray]:
    """Drop exact duplicate rows, keeping first occurrences in file order.

    Returns the reduced set and the 0-based original index of each kept row.
    """
    ps = as_pointset(points)
    _, first = np.unique(ps.coords, axis=0, return_index=True)
    keep = np.sort(first)
    return PointSet(ps.coords[keep]), keep


def _fmt_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def labels_csv(result) -> str:
    ids = range(1, len(result.labels) + 1)
    return "id,label\n" + "".join(
        f"{i},{int(lab)}\n" for i, lab in zip(ids, result.labels.tolist()))


def decision_graph_csv(result) -> str:
    ids = range(1, len(result.rho) + 1)
    return "id,rho,delta\n" + "".join(
        f"{i},{int(r)},{_fmt_float(dl)}\n"
        for i, r, dl in zip(ids, result.rho.tolist(), result.delta.tolist()))


def write_labels(path, result) -> None:
    _atomic_write(path, labels_csv(result))


def write_decision_graph(path, result) -> None:
    _atomic_write(path, decision_graph_csv(result))

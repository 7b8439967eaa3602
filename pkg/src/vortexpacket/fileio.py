"""Deterministic writers and readers for trajectories, grids and paths.

Floats are written with 17 significant digits so that every value read
back is bit-identical to the one written.

``VPGRID01`` binary layout (little-endian)::

    bytes  0..7   magic b"VPGRID01"
    bytes  8..15  grid_n   (int64)
    bytes 16..23  extent   (float64)
    bytes 24..31  tau      (float64)
    then grid_n*grid_n complex samples as (re, im) float64 pairs, row-major
    in ``values[i, j]`` order (i along x).
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .dynamics import CSV_COLUMNS, Trajectory
from .modes import CurrentField, GridField, grid_axes

__all__ = [
    "GRID_MAGIC",
    "GRID_CSV_COLUMNS",
    "fmt",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_grid_binary",
    "read_grid_binary",
    "write_grid_csv",
    "read_path_csv",
    "write_table_csv",
]

GRID_MAGIC = b"VPGRID01"
_HEADER = struct.Struct("<8sqdd")
GRID_CSV_COLUMNS = ("x", "y", "re_u", "im_u", "rho", "j_x", "j_y", "j_z")


def fmt(x) -> str:
    return format(float(x), ".17g")


def _io_error(path, exc):
    return OSError(f"{path}: {exc.strerror or exc}")


def write_table_csv(path, header, rows):
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise _io_error(path, exc) from exc


def write_trajectory_csv(traj: Trajectory, path):
    """Write the 16-column trajectory table (header only if empty)."""
    data = np.asarray(traj.data if isinstance(traj, Trajectory) else traj, dtype=float)
    write_table_csv(path, CSV_COLUMNS, data.reshape(-1, len(CSV_COLUMNS)))


def read_trajectory_csv(path) -> np.ndarray:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != CSV_COLUMNS:
                raise ValueError(f"{path}: unexpected header {header}")
            rows = [[float(v) for v in row] for row in reader]
    except OSError as exc:
        raise _io_error(path, exc) from exc
    return np.array(rows, dtype=float).reshape(-1, len(CSV_COLUMNS))


def write_grid_binary(grid: GridField, path):
    path = Path(path)
    payload = np.ascontiguousarray(grid.values, dtype="<c16").tobytes()
    try:
        with path.open("wb") as fh:
            fh.write(_HEADER.pack(GRID_MAGIC, grid.grid_n, grid.extent, grid.tau))
            fh.write(payload)
    except OSError as exc:
        raise _io_error(path, exc) from exc


def read_grid_binary(path) -> GridField:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise _io_error(path, exc) from exc
    if len(blob) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, n, extent, tau = _HEADER.unpack_from(blob)
    if magic != GRID_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 16 * n * n
    if len(blob) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(blob)}")
    values = np.frombuffer(blob, dtype="<c16", offset=_HEADER.size).reshape(n, n).astype(complex)
    return GridField(values, extent, n, tau)


def write_grid_csv(grid: GridField, path, current: CurrentField | None = None):
    """One row per sample: x, y, Re u, Im u, rho, j_x, j_y, j_z.

    Without ``current`` the three current columns are written as zeros.
    """
    _, X, Y = grid_axes(grid.grid_n, grid.extent)
    u = grid.values
    rho = np.abs(u) ** 2
    j = current.exact if current is not None else np.zeros((3,) + u.shape)
    cols = [X, Y, u.real, u.imag, rho, j[0], j[1], j[2]]
    table = np.stack([c.ravel() for c in cols], axis=1)
    write_table_csv(path, GRID_CSV_COLUMNS, table)


def read_path_csv(path) -> np.ndarray:
    """Read momentum points ``p_x, p_y, p_z``; an optional header is skipped."""
    path = Path(path)
    rows = []
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            for k, row in enumerate(csv.reader(fh)):
                row = [c.strip() for c in row if c.strip()]
                if not row or row[0].startswith("#"):
                    continue
                try:
                    vals = [float(c) for c in row]
                except ValueError:
                    if k == 0:
                        continue
                    raise ValueError(f"{path}: line {k + 1}: not numeric: {row}") from None
                if len(vals) != 3:
                    raise ValueError(f"{path}: line {k + 1}: expected 3 columns")
                rows.append(vals)
    except OSError as exc:
        raise _io_error(path, exc) from exc
    return np.array(rows, dtype=float)

"""Trajectory export and import.

CSV layout: one header row naming a time column followed by the state
variables, then one row per recorded state.

Binary layout (all little-endian):
    bytes 0-4    magic b"PHLK1"
    uint32       number of columns (excluding time)
    uint64       number of rows
    float64      t0 (time of the first row)
    float64      dt (row spacing)
    n_cols x 16  column names, ASCII, NUL-padded
    rows x cols  float64 data, row-major (no time column; it is implied)
"""

from __future__ import annotations

import csv
import struct

import numpy as np

MAGIC = b"PHLK1"
_NAME_WIDTH = 16


class TrajectoryFormatError(ValueError):
    """Malformed trajectory file; carries a line number for CSV input."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def save_trajectory_csv(path, names, data, t0=0.0, dt=1.0):
    """Write states (n_rows, n_cols) with an explicit time column."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(names):
        raise ValueError("data must be 2-d with one column per name")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + list(names))
        for i in range(data.shape[0]):
            w.writerow([repr(float(t0 + i * dt))] + [repr(float(v)) for v in data[i]])


def load_trajectory_csv(path):
    """Read a trajectory CSV; returns (names, t0, dt, data)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TrajectoryFormatError("empty file", line=1) from None
        if len(header) < 2 or header[0].strip() != "t":
            raise TrajectoryFormatError("header must start with a 't' column", line=1)
        names = [h.strip() for h in header[1:]]
        times, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise TrajectoryFormatError(
                    f"expected {len(header)} fields, got {len(row)}", line=lineno)
            try:
                values = [float(v) for v in row]
            except ValueError as exc:
                raise TrajectoryFormatError(str(exc), line=lineno) from None
            times.append(values[0])
            rows.append(values[1:])
    if len(rows) < 2:
        raise TrajectoryFormatError("need at least two rows")
    data = np.asarray(rows)
    t = np.asarray(times)
    dts = np.diff(t)
    if not np.allclose(dts, dts[0], rtol=1e-6, atol=1e-12) or dts[0] <= 0:
        raise TrajectoryFormatError("time column must be uniformly increasing")
    return names, float(t[0]), float(dts[0]), data


def save_trajectory_bin(path, names, data, t0=0.0, dt=1.0):
    """Write the documented fixed-width binary layout."""
    data = np.ascontiguousarray(data, dtype="<f8")
    if data.ndim != 2 or data.shape[1] != len(names):
        raise ValueError("data must be 2-d with one column per name")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IQdd", len(names), data.shape[0], float(t0), float(dt)))
        for name in names:
            raw = name.encode("ascii")
            if len(raw) >= _NAME_WIDTH:
                raise ValueError(f"column name too long: {name!r}")
            fh.write(raw.ljust(_NAME_WIDTH, b"\0"))
        fh.write(data.tobytes())


def load_trajectory_bin(path):
    """Read the binary layout; returns (names, t0, dt, data)."""
    with open(path, "rb") as fh:
        magic = fh.read(5)
        if magic != MAGIC:
            raise TrajectoryFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        n_cols, n_rows, t0, dt = struct.unpack("<IQdd", fh.read(4 + 8 + 8 + 8))
        names = []
        for _ in range(n_cols):
            raw = fh.read(_NAME_WIDTH)
            names.append(raw.rstrip(b"\0").decode("ascii"))
        payload = fh.read(n_rows * n_cols * 8)
        if len(payload) != n_rows * n_cols * 8:
            raise TrajectoryFormatError("truncated data section")
        data = np.frombuffer(payload, dtype="<f8").reshape(n_rows, n_cols).copy()
    return names, t0, dt, data

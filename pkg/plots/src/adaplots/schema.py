"""Reading and validating the frozen schema-1 CSV tables.

The header fully determines the layout: player count and per-player
dimensions are recovered from the column names, and any deviation from
the declared column order is rejected with the offending column named.
"""

import csv
import re

import numpy as np


class SchemaError(ValueError):
    """A CSV does not match the frozen schema."""


_KINDS = ("trajectory", "regret", "rates", "residuals")


def _expected_from_trajectory(header):
    """Recover (players, dims) from a trajectory header, then re-derive the
    exact expected header; mismatches fall out as a comparison failure."""
    dims = []
    i = 1
    while i < len(header):
        m = re.fullmatch(rf"p{len(dims) + 1}_x(\d+)", header[i])
        if not m:
            break
        d = 0
        while i < len(header):
            m = re.fullmatch(rf"p{len(dims) + 1}_x{d + 1}", header[i])
            if not m:
                break
            d += 1
            i += 1
        dims.append(d)
    return dims


def expected_header(kind, players, dims=None):
    if kind == "trajectory":
        cols = ["t"]
        for i in range(players):
            cols += [f"p{i + 1}_x{j + 1}" for j in range(dims[i])]
        cols += [f"p{i + 1}_dist" for i in range(players)]
        return cols
    if kind == "regret":
        return (["t"] + [f"p{i + 1}_regret" for i in range(players)]
                + [f"p{i + 1}_cert" for i in range(players)] + ["social"])
    if kind == "rates":
        return (["t"] + [f"p{i + 1}_eta" for i in range(players)]
                + [f"p{i + 1}_delta" for i in range(players)])
    if kind == "residuals":
        return ["t"] + [f"p{i + 1}_residual" for i in range(players)]
    raise SchemaError(f"unknown table kind {kind!r} (choose from {_KINDS})")


def _infer_counts(kind, header):
    """(players, dims) implied by the header shape; SchemaError if no shape fits."""
    n = len(header)
    if kind == "trajectory":
        dims = _expected_from_trajectory(header)
        if not dims:
            raise SchemaError(f"trajectory header must start 't,p1_x1,...', got {header[:3]}")
        return len(dims), dims
    if kind == "regret":
        if n < 4 or (n - 2) % 2:
            raise SchemaError(f"regret header has {n} columns, expected 2p + 2")
        return (n - 2) // 2, None
    if kind == "rates":
        if n < 3 or (n - 1) % 2:
            raise SchemaError(f"rates header has {n} columns, expected 2p + 1")
        return (n - 1) // 2, None
    if kind == "residuals":
        if n < 2:
            raise SchemaError(f"residuals header has {n} columns, expected p + 1")
        return n - 1, None
    raise SchemaError(f"unknown table kind {kind!r} (choose from {_KINDS})")


def read_table(path, kind):
    """Parse one CSV into a dict of numpy columns, validating the header.

    Returns {"t": int array, <column>: float array, ..., "players": p,
    "dims": per-player dims for trajectory tables}.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}")
    if not rows:
        raise SchemaError(f"{path} is empty (no header row)")
    header = rows[0]
    players, dims = _infer_counts(kind, header)
    want = expected_header(kind, players, dims)
    if header != want:
        for got, exp in zip(header, want):
            if got != exp:
                raise SchemaError(
                    f"{path}: column {exp!r} expected, found {got!r}")
        raise SchemaError(f"{path}: header length {len(header)} != {len(want)}")
    body = rows[1:]
    if not body:
        raise SchemaError(f"{path} has a header but no data rows")
    width = len(want)
    for k, row in enumerate(body):
        if len(row) != width:
            raise SchemaError(f"{path}: row {k + 2} has {len(row)} fields, expected {width}")
    data = np.array([[float(v) for v in row] for row in body])
    out = {"t": data[:, 0].astype(int), "players": players, "dims": dims}
    for j, name in enumerate(want[1:], start=1):
        out[name] = data[:, j]
    return out

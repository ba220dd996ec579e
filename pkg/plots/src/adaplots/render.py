"""Figure builders over validated CSV tables.

Rendering is deterministic: styling is pinned in an rc context, the PNG
metadata is fixed, and nothing depends on wall-clock time, so repeated
renders of the same inputs produce byte-identical files.
"""

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from adaplots.schema import SchemaError, read_table

KINDS = ("trajectory", "regret", "phase-portrait")

_RC = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.1,
    "legend.framealpha": 0.9,
    "axes.prop_cycle": plt.cycler(color=[
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]),
}

_META = {"Software": "adaplots"}


@dataclass
class FigureSpec:
    kind: str                      # trajectory | regret | phase-portrait
    csv: str                       # input table (trajectory or regret schema)
    out: str                       # output image path
    players: list | None = None    # 1-based player numbers; None = all
    coords: list | None = None     # 1-based coordinate numbers; None = all
    logx: bool = False             # log-scale rounds axis (regret plots)
    title: str | None = None


def _select_players(table, spec):
    chosen = spec.players or list(range(1, table["players"] + 1))
    for i in chosen:
        if not 1 <= i <= table["players"]:
            raise SchemaError(f"player {i} not in file (has {table['players']})")
    return chosen


def _series_pairs(table, spec):
    """Flattened (player, coord) pairs for trajectory-style plots."""
    pairs = []
    for i in _select_players(table, spec):
        dim = table["dims"][i - 1]
        coords = spec.coords or list(range(1, dim + 1))
        for j in coords:
            if not 1 <= j <= dim:
                raise SchemaError(f"coordinate {j} not present for player {i} (dim {dim})")
            pairs.append((i, j))
    return pairs


def _finish(fig, ax, spec):
    if spec.title:
        ax.set_title(spec.title)
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, metadata=_META)
    plt.close(fig)
    return out


def _render_trajectory(spec):
    table = read_table(spec.csv, "trajectory")
    t = table["t"]
    fig, ax = plt.subplots()
    for i, j in _series_pairs(table, spec):
        ax.plot(t, table[f"p{i}_x{j}"], label=f"player {i}, coord {j}")
    if spec.logx:
        ax.set_xscale("log")
    ax.set_xlabel("round")
    ax.set_ylabel("played coordinate")
    ax.legend(loc="best")
    return _finish(fig, ax, spec)


def _render_regret(spec):
    table = read_table(spec.csv, "regret")
    t = table["t"]
    fig, ax = plt.subplots()
    for i in _select_players(table, spec):
        ax.plot(t, table[f"p{i}_regret"], label=f"player {i}")
    ax.plot(t, table["social"], "k--", label="social")
    if spec.logx:
        ax.set_xscale("log")
    ax.set_xlabel("round")
    ax.set_ylabel("regret")
    ax.legend(loc="best")
    return _finish(fig, ax, spec)


def _render_phase(spec):
    table = read_table(spec.csv, "trajectory")
    pairs = _series_pairs(table, spec)
    if len(pairs) != 2:
        raise SchemaError(
            f"phase portrait needs exactly 2 coordinates, selection has {len(pairs)}")
    (i1, j1), (i2, j2) = pairs
    x = table[f"p{i1}_x{j1}"]
    y = table[f"p{i2}_x{j2}"]
    # running time-average of the logged rows: exact at stride 1, a uniform
    # subsample average otherwise, which is all the overlay needs
    k = np.arange(1, len(x) + 1)
    xa, ya = np.cumsum(x) / k, np.cumsum(y) / k
    fig, ax = plt.subplots()
    ax.plot(x, y, lw=0.8, alpha=0.85, label="play")
    ax.plot(xa, ya, lw=1.6, label="time average")
    ax.plot([x[0]], [y[0]], "o", ms=5, color="#1f77b4", label="start")
    ax.plot([x[-1]], [y[-1]], "s", ms=5, color="#d62728", label="final")
    ax.set_xlabel(f"player {i1}, coord {j1}")
    ax.set_ylabel(f"player {i2}, coord {j2}")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="best")
    return _finish(fig, ax, spec)


def render(spec):
    """Render one figure; returns the output path.

    Raises SchemaError for malformed inputs (nothing is written in that
    case) and overwrites the output idempotently otherwise.
    """
    if spec.kind not in KINDS:
        raise SchemaError(f"unknown figure kind {spec.kind!r} (choose from {KINDS})")
    with matplotlib.rc_context(_RC):
        if spec.kind == "trajectory":
            return _render_trajectory(spec)
        if spec.kind == "regret":
            return _render_regret(spec)
        return _render_phase(spec)

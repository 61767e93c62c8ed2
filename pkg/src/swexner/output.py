"""Snapshot CSV files, crest tracking, speedup tables and bedload-law tables."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

import numpy as np

from swexner.bedload import SHIELDS_FORMULAS, shields_flux
from swexner.grid import H_DRY, Field, make_grid


def snapshot_name(time: float) -> str:
    return f"snapshot_t{time:012.4f}.csv"


def snapshot_rows(field: Field, time: float, h_dry: float = H_DRY):
    grid = field.grid
    h, u, v, zb = field.primitives(h_dry)
    X, Y = grid.meshgrid()
    cols = [X.ravel()]
    header = ["x"]
    if grid.dim == 2:
        cols.append(Y.ravel())
        header.append("y")
    cols += [h.ravel(), u.ravel()]
    header += ["h", "u"]
    if grid.dim == 2:
        cols.append(v.ravel())
        header.append("v")
    cols += [zb.ravel(), (h + zb).ravel(), np.full(grid.ncells, float(time))]
    header += ["zb", "eta", "time"]
    return header, np.column_stack(cols)


def write_snapshot(field: Field, time: float, path, h_dry: float = H_DRY) -> str:
    """Write one snapshot as CSV (17 significant digits, x fastest)."""
    header, data = snapshot_rows(field, time, h_dry)
    if not np.all(np.isfinite(data)):
        raise ValueError(f"refusing to write non-finite values to {path}")
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    np.savetxt(buf, data, fmt="%.17g", delimiter=",")
    try:
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write snapshot {path}: {exc.strerror or exc}") from exc
    return str(path)


def read_snapshot(path) -> tuple[float, Field]:
    with open(path, newline="") as fh:
        header = next(csv.reader(fh))
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    col = {name: data[:, k] for k, name in enumerate(header)}
    time = float(col["time"][0])
    x = np.unique(col["x"])
    if "y" in col:
        y = np.unique(col["y"])
        grid = make_grid(2, (len(x) * 2 * x[0], len(y) * 2 * y[0]), (len(x), len(y)))
        v = col["v"]
    else:
        grid = make_grid(1, len(x) * 2 * x[0], len(x))
        v = np.zeros_like(col["h"])
    h = col["h"]
    return time, Field(grid, h, h * col["u"], h * v, col["zb"])


class SnapshotWriter:
    """Callback writing each snapshot into ``directory`` and keeping an index."""

    def __init__(self, directory, keep: bool = False, h_dry: float = H_DRY):
        self.directory = str(directory)
        self.keep = keep
        self.h_dry = h_dry
        self.paths = []
        self.snapshots = []
        os.makedirs(self.directory, exist_ok=True)

    def __call__(self, time: float, field: Field) -> None:
        path = os.path.join(self.directory, snapshot_name(time))
        self.paths.append(write_snapshot(field, time, path, self.h_dry))
        if self.keep:
            self.snapshots.append((time, field.copy()))


@dataclass(frozen=True)
class CrestTrack:
    times: tuple
    positions: tuple
    verdict: str


def crest_track(snapshots) -> CrestTrack:
    """Position of the highest bed cell per snapshot and the migration verdict.

    ``snapshots`` is a sequence of ``(time, Field)``. Ties go to the smallest
    x. The verdict is ``downstream`` for strictly increasing positions,
    ``upstream`` for strictly decreasing ones and ``none`` otherwise
    (including a flat bed).
    """
    snapshots = list(snapshots)
    if len(snapshots) < 2:
        raise ValueError("crest tracking needs at least two snapshots")
    times, xs, flat = [], [], True
    for t, f in snapshots:
        X, _ = f.grid.meshgrid()
        zb = f.zb
        flat &= bool(np.all(zb == zb.flat[0]))
        top = zb.max()
        xs.append(float(X[zb == top].min()))
        times.append(float(t))
    d = np.diff(xs)
    if flat:
        verdict = "none"
    elif np.all(d > 0):
        verdict = "downstream"
    elif np.all(d < 0):
        verdict = "upstream"
    else:
        verdict = "none"
    return CrestTrack(tuple(times), tuple(xs), verdict)


@dataclass(frozen=True)
class SpeedupRow:
    workers: int
    seconds: float
    speedup: float
    efficiency: float


def speedup_report(timings: dict, ref_p: int = 4) -> list[SpeedupRow]:
    """Rows ``(p, T_p, S_p = ref_p * T_ref / T_p, S_p / p)`` sorted by p."""
    if ref_p not in timings:
        raise KeyError(f"no timing for the reference worker count {ref_p}")
    t_ref = float(timings[ref_p])
    rows = []
    for p in sorted(timings):
        s = ref_p * t_ref / float(timings[p])
        rows.append(SpeedupRow(int(p), float(timings[p]), s, s / p))
    return rows


def format_speedup(rows) -> str:
    lines = ["workers,seconds,speedup,efficiency"]
    lines += [f"{r.workers},{r.seconds:.6f},{r.speedup:.6f},{r.efficiency:.6f}" for r in rows]
    return "\n".join(lines) + "\n"


def flux_table(taus, tau_cr: float = 0.05) -> str:
    """CSV of q* versus tau* for every Shields-type formula."""
    lines = ["tau_star," + ",".join(SHIELDS_FORMULAS)]
    for tau in taus:
        vals = [float(shields_flux(f, tau, tau_cr)) for f in SHIELDS_FORMULAS]
        lines.append(",".join([f"{float(tau):.17g}"] + [f"{v:.17g}" for v in vals]))
    return "\n".join(lines) + "\n"

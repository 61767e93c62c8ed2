"""Command-line driver: ``simulate``, ``regime``, ``bench-speedup`` and ``flux-table``."""

from __future__ import annotations

import argparse
import os
import sys
import warnings

from swexner.bedload import FRICTION_KINDS, LAW_KINDS
from swexner.config import parse_config, with_overrides
from swexner.errors import ConfigurationError, SolverError
from swexner.output import SnapshotWriter, crest_track, flux_table, format_speedup, speedup_report
from swexner.parallel import run_parallel
from swexner.regime import classify


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", help="dune1d, antidune1d or bump2d")
    p.add_argument("--config", help="plain-text key = value configuration file")
    p.add_argument("--cells", help="cell count N (1D) or JxK (2D)")
    p.add_argument("--t-end", help="final time in seconds")
    p.add_argument("--cfl", help="CFL number in (0, 1]")
    p.add_argument("--law", help="bedload law: " + ", ".join(LAW_KINDS))
    p.add_argument("--ag", help="Grass coefficient A_g")
    p.add_argument("--mg", help="Grass exponent m_g")


def _run_config(args, extra=None):
    text = ""
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc.strerror or exc}") from None
    overrides = {"scenario": args.scenario, "cells": args.cells, "t_end": args.t_end, "cfl": args.cfl,
                 "law": args.law, "ag": args.ag, "mg": args.mg}
    overrides.update(extra or {})
    return parse_config(text, overrides)


def cmd_simulate(args) -> int:
    cfg = _run_config(args, {"workers": args.workers, "out": args.out,
                             "snap_every": args.snap_every, "snap_at": args.snap_at})
    scenario = cfg.build_scenario()
    times = cfg.snapshot_times() or scenario.snapshot_times or (0.0, cfg.t_end)
    times = tuple(t for t in times if t <= cfg.t_end)
    writer = SnapshotWriter(cfg.out, keep=scenario.grid.dim == 1)
    layout = cfg.layout(scenario.grid.dim)
    field, report = run_parallel(scenario, workers=layout, snapshot_times=times, on_snapshot=writer,
                                 corners=cfg.corners, safety=cfg.safety)
    timing_path = os.path.join(cfg.out, "timing.csv")
    with open(timing_path, "w") as fh:
        fh.write(report.to_csv())
    print(f"{scenario.name}: {report.steps} steps to t = {cfg.t_end:g} s on {layout[0]}x{layout[1]} "
          f"workers in {report.wall_s:.2f} s")
    print(f"water volume {field.water_volume():.12g} m^3, sediment volume {field.sediment_volume():.12g} m^3")
    print(f"wrote {len(writer.paths)} snapshot(s) and {timing_path}")
    if len(writer.snapshots) >= 2:
        track = crest_track(writer.snapshots)
        crest = ", ".join(f"{t:g}:{x:.6g}" for t, x in zip(track.times, track.positions))
        print(f"crest x by time: {crest} ({track.verdict})")
    return 0


def cmd_regime(args) -> int:
    cfg = parse_config("scenario = dune1d", {"law": args.law, "ag": args.ag, "mg": args.mg,
                                             "tau_cr": args.tau_cr, "d_s": args.d_s, "s": args.s,
                                             "friction": args.friction, "friction_coef": args.friction_coef})
    rep = classify(args.h, args.h * args.u, cfg.bedload_law(), g=cfg.g)
    print(f"h = {args.h:g} m, u = {args.u:g} m/s, law = {cfg.law}")
    print("roots: " + ", ".join(f"{r:.10g}" for r in rep.roots))
    print(f"froude: {rep.froude:.10g}")
    print(f"hyperbolic: {rep.hyperbolic}")
    print(f"sediment root: {rep.sediment_root:.10g}")
    print(f"pattern: {rep.pattern}")
    print(f"classification: {rep.classification}")
    return 0


def cmd_bench(args) -> int:
    cfg = _run_config(args, {"scenario": args.scenario or "bump2d"})
    counts = sorted({int(w) for w in args.workers.split(",")})
    timings = {}
    for p in counts:
        _, report = run_parallel(cfg.build_scenario(), workers=p)
        timings[p] = report.wall_s
        print(f"p = {p}: {report.wall_s:.3f} s ({report.steps} steps)", file=sys.stderr)
    ref = args.ref if args.ref is not None else (4 if 4 in timings else counts[0])
    text = format_speedup(speedup_report(timings, ref))
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(text)
    print(text, end="")
    return 0


def cmd_flux_table(args) -> int:
    taus = [float(t) for t in args.taus.split(",")]
    if any(t < 0 for t in taus):
        raise ConfigurationError("tau* values must be >= 0")
    print(flux_table(taus, args.tau_cr), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swexner", description="Shallow-water Exner bedform solver")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write CSV snapshots")
    _add_run_flags(sim)
    sim.add_argument("--workers", help="worker count N or layout PXxPY")
    sim.add_argument("--out", help="output directory")
    sim.add_argument("--snap-every", help="snapshot interval in seconds")
    sim.add_argument("--snap-at", help="comma-separated snapshot times")
    sim.set_defaults(func=cmd_simulate)

    reg = sub.add_parser("regime", help="characteristic roots and bedform regime at one state")
    reg.add_argument("--h", type=float, required=True, help="water depth (m)")
    reg.add_argument("--u", type=float, required=True, help="velocity (m/s)")
    reg.add_argument("--law", default="grass", choices=LAW_KINDS)
    reg.add_argument("--ag")
    reg.add_argument("--mg")
    reg.add_argument("--tau-cr")
    reg.add_argument("--d-s")
    reg.add_argument("--s")
    reg.add_argument("--friction", choices=FRICTION_KINDS)
    reg.add_argument("--friction-coef")
    reg.set_defaults(func=cmd_regime)

    bench = sub.add_parser("bench-speedup", help="time a scenario over several worker counts")
    _add_run_flags(bench)
    bench.add_argument("--workers", default="1,2,4,8", help="comma-separated worker counts")
    bench.add_argument("--ref", type=int, help="reference worker count (default 4 when measured)")
    bench.add_argument("--csv", help="also write the table to this file")
    bench.set_defaults(func=cmd_bench)

    flux = sub.add_parser("flux-table", help="q* versus tau* for the Shields-type laws")
    flux.add_argument("--taus", default="0,0.025,0.05,0.075,0.1,0.15,0.2,0.3,0.4,0.5")
    flux.add_argument("--tau-cr", type=float, default=0.05)
    flux.set_defaults(func=cmd_flux_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (ConfigurationError, SolverError, OSError, ValueError, KeyError) as exc:
        print(f"swexner: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

import math
import os

import numpy as np
import pytest

from oracles import hand_shields
from swexner import Field, make_grid
from swexner.output import (SnapshotWriter, crest_track, flux_table, read_snapshot, speedup_report,
                            write_snapshot)
from swexner.parallel import run_parallel
from swexner.scenarios import build_dune_1d


class TestSnapshots:
    def test_single_cell_file(self, tmp_path):
        f = Field(make_grid(1, 1.0, 1), 2.0, 1.0, zb=0.5)
        path = write_snapshot(f, 3.0, tmp_path / "s.csv")
        lines = open(path).read().splitlines()
        assert lines[0] == "x,h,u,zb,eta,time"
        assert lines[1] == "0.5,2,0.5,0.5,2.5,3"

    def test_roundtrip_2d(self, tmp_path, rng):
        g = make_grid(2, (3.0, 2.0), (6, 4))
        f = Field(g, rng.uniform(0.5, 2, g.shape), rng.normal(size=g.shape), rng.normal(size=g.shape),
                  rng.uniform(size=g.shape) / 3)
        write_snapshot(f, 1.25, tmp_path / "s.csv")
        assert open(tmp_path / "s.csv").readline().strip() == "x,y,h,u,v,zb,eta,time"
        t, back = read_snapshot(tmp_path / "s.csv")
        assert t == 1.25 and back.grid == g
        for name in ("h", "hu", "hv", "zb"):
            np.testing.assert_allclose(getattr(back, name), getattr(f, name), rtol=1e-15, atol=1e-15)

    def test_io_error_names_path(self, tmp_path):
        f = Field(make_grid(1, 1.0, 1), 1.0, 0.0)
        bad = tmp_path / "missing" / "s.csv"
        with pytest.raises(OSError, match="missing"):
            write_snapshot(f, 0.0, bad)

    def test_rejects_non_finite(self, tmp_path):
        f = Field(make_grid(1, 1.0, 2), [1.0, np.nan], 0.0)
        with pytest.raises(ValueError):
            write_snapshot(f, 0.0, tmp_path / "s.csv")

    def test_byte_identical_runs(self, tmp_path):
        outs = []
        for k in range(2):
            w = SnapshotWriter(tmp_path / f"run{k}")
            run_parallel(build_dune_1d(J=100, t_end=10.0), workers=2, snapshot_times=(0.0, 5.0, 10.0),
                         on_snapshot=w)
            outs.append([open(p, "rb").read() for p in w.paths])
        assert len(outs[0]) == 3 and outs[0] == outs[1]


class TestCrest:
    def fields(self, peaks, n=50):
        g = make_grid(1, 50.0, n)
        x = g.x_centers()
        return [(float(t), Field(g, 1.0, 0.0, zb=np.exp(-(x - p) ** 2))) for t, p in enumerate(peaks)]

    def test_directions(self):
        assert crest_track(self.fields([10, 20, 30])).verdict == "downstream"
        assert crest_track(self.fields([30, 20, 10])).verdict == "upstream"
        assert crest_track(self.fields([10, 30, 20])).verdict == "none"

    def test_flat_bed(self):
        g = make_grid(1, 5.0, 5)
        snaps = [(0.0, Field(g, 1.0, 0.0, zb=0.2)), (1.0, Field(g, 1.0, 0.0, zb=0.2))]
        tr = crest_track(snaps)
        assert tr.verdict == "none" and tr.positions == (0.5, 0.5)

    def test_tie_takes_smallest_x(self):
        g = make_grid(1, 4.0, 4)
        snaps = [(0.0, Field(g, 1.0, 0.0, zb=[0, 1, 0, 1])), (1.0, Field(g, 1.0, 0.0, zb=[0, 0, 1, 1]))]
        assert crest_track(snaps).positions == (1.5, 2.5)

    def test_needs_two(self):
        with pytest.raises(ValueError):
            crest_track(self.fields([10]))


class TestSpeedup:
    def test_worked_value(self):
        rows = speedup_report({4: 100.0, 8: 52.0}, ref_p=4)
        assert rows[1].speedup == pytest.approx(7.692, abs=5e-4)
        assert rows[0].speedup == 4.0

    def test_ideal_scaling(self):
        rows = speedup_report({p: 400.0 / p for p in (1, 2, 4, 8, 16)}, ref_p=4)
        for r in rows:
            assert r.speedup == pytest.approx(r.workers) and r.efficiency == pytest.approx(1.0)

    def test_missing_reference(self):
        with pytest.raises(KeyError):
            speedup_report({1: 3.0}, ref_p=4)


def test_flux_table_hand_values():
    text = flux_table([0.05, 0.1, 0.2], 0.05)
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    for line in lines[1:]:
        vals = [float(v) for v in line.split(",")]
        for name, v in zip(header[1:], vals[1:]):
            assert abs(v - hand_shields(name, vals[0], 0.05)) < 1e-10

import numpy as np
import pytest
from hypothesis import given, strategies as st

from swexner import ConfigurationError, Field, SolverError, make_grid
from swexner.boundary import Periodic, apply_bcs, normalize_bcs
from swexner.parallel import (Topology, block_sizes, default_layout, gather, global_dt,
                              halo_exchange, partition, run_parallel, scatter)
from swexner.scenarios import Scenario, build_bump_2d, build_dune_1d
from swexner.solver import integrate, pad


class TestDecomposition:
    def test_remainder_to_lowest(self):
        assert block_sizes(10, 3) == [4, 3, 3]
        with pytest.raises(ConfigurationError):
            block_sizes(2, 3)

    @given(st.integers(1, 60), st.integers(1, 60), st.integers(1, 4), st.integers(1, 4))
    def test_partition_tiles_grid(self, nx, ny, px, py):
        if px > nx or py > ny:
            return
        subs = partition(make_grid(2, (1.0, 1.0), (nx, ny)), px, py)
        cover = np.zeros((ny, nx), dtype=int)
        for s in subs:
            cover[s.j0:s.j1, s.i0:s.i1] += 1
        assert np.all(cover == 1)

    def test_topology(self):
        t = Topology(3, 2)
        assert t.coords(4) == (1, 1) and t.rank_of(1, 1) == 4
        assert t.neighbors(0)["W"] is None and t.neighbors(0)["NE"] == 4
        tp = Topology(3, 2, periodic_x=True)
        assert tp.neighbors(0)["W"] == 2

    def test_one_dimensional_split(self):
        with pytest.raises(ConfigurationError):
            partition(make_grid(1, 1.0, 10), 2, 2)

    def test_layouts(self):
        assert default_layout(4, 2) == (2, 2)
        assert default_layout(8, 2) == (4, 2)
        assert default_layout(6, 1) == (6, 1)
        assert global_dt([0.3, 0.1, 0.2]) == 0.1

    def test_scatter_gather_roundtrip(self, rng):
        g = make_grid(2, (1.0, 1.0), (13, 7))
        f = Field(g, rng.uniform(1, 2, g.shape), rng.normal(size=g.shape), rng.normal(size=g.shape),
                  rng.uniform(size=g.shape))
        back = gather(g, scatter(f, partition(g, 3, 2)))
        assert np.array_equal(back.stacked(), f.stacked())


class TestHalo:
    @pytest.mark.parametrize("periodic", [False, True])
    def test_matches_global_padding(self, periodic, rng):
        g = make_grid(2, (1.0, 1.0), (11, 9))
        f = Field(g, rng.uniform(1, 2, g.shape), rng.normal(size=g.shape), rng.normal(size=g.shape),
                  rng.uniform(size=g.shape))
        bcs = normalize_bcs({"west": Periodic(), "east": Periodic()} if periodic else {"north": Periodic(), "south": Periodic()})
        P = apply_bcs(pad(f), bcs)
        subs = halo_exchange(scatter(f, partition(g, 3, 2, periodic, not periodic)), bcs)
        for s in subs:
            local = P[:, s.j0:s.j1 + 2, s.i0:s.i1 + 2]
            # edges (not corners) must agree exactly
            assert np.array_equal(s.P[:, 1:-1, :], local[:, 1:-1, :])
            assert np.array_equal(s.P[:, :, 1:-1], local[:, :, 1:-1])


class TestRunParallel:
    def test_one_dimensional_worker_independence(self):
        sc = build_dune_1d(J=300, t_end=30.0)
        ref, _ = run_parallel(sc, workers=1)
        for p in (2, 3):
            f, rep = run_parallel(build_dune_1d(J=300, t_end=30.0), workers=p)
            assert np.array_equal(f.stacked(), ref.stacked())
            assert rep.workers == p

    def test_matches_serial_integrator(self):
        sc = build_dune_1d(J=200, t_end=20.0)
        a, _ = run_parallel(sc, workers=2)
        b, t, _ = integrate(sc.field, sc.law, 20.0, sc.bcs, cfl=sc.cfl)
        assert np.array_equal(a.stacked(), b.stacked())

    def test_two_dimensional_layouts_and_corners(self):
        ref, _ = run_parallel(build_bump_2d(J=30, K=30, t_end=10.0), workers=(1, 1))
        for layout in ((2, 1), (1, 3), (2, 2)):
            for corners in (True, False):
                f, rep = run_parallel(build_bump_2d(J=30, K=30, t_end=10.0), workers=layout, corners=corners)
                assert np.array_equal(f.stacked(), ref.stacked()), (layout, corners)
                assert rep.layout == layout

    def test_periodic_conservation(self):
        sc = build_dune_1d(J=120).with_periodic_x()
        w0, s0 = sc.field.water_volume(), sc.field.sediment_volume()
        f, rep = run_parallel(sc, workers=3, max_steps=200)
        assert rep.steps == 200
        assert f.water_volume() == pytest.approx(w0, rel=1e-12)
        assert f.sediment_volume() == pytest.approx(s0, rel=1e-12)

    def test_snapshots_from_rank_zero(self):
        seen = []
        run_parallel(build_dune_1d(J=60, t_end=5.0), workers=2, snapshot_times=(0.0, 2.0, 5.0),
                     on_snapshot=lambda t, f: seen.append((t, f.grid.nx)))
        assert seen == [(0.0, 60), (2.0, 60), (5.0, 60)]

    def test_timing_report(self):
        _, rep = run_parallel(build_dune_1d(J=60, t_end=1.0), workers=2)
        lines = rep.to_csv().strip().splitlines()
        assert lines[0] == "rank,steps,compute_s,exchange_s"
        assert len(lines) == 3 and all(int(l.split(",")[1]) == rep.steps for l in lines[1:])

    def test_worker_failure_surfaces(self):
        g = make_grid(1, 10.0, 20)
        f = Field(g, np.where(g.x_centers() < 5, 2.0, 1.0), 0.0)
        sc = build_dune_1d(J=20)
        bad = Scenario("bad", g, f, sc.law, {}, 1.0, cfl=1.0)
        # a vanishing safety factor breaks the celerity bound and the update
        with pytest.raises(SolverError):
            run_parallel(bad, workers=2, safety=1e-3)

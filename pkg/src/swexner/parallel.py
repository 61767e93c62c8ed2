"""Domain decomposition over a Cartesian worker grid.

Every worker owns one block of the global grid plus a one-cell ghost frame
and runs the same loop (SPMD): refresh ghosts from its neighbours, compute a
local time step, agree on the global minimum, advance its block. Workers are
OS threads; the compiled kernels release the GIL so blocks advance
concurrently. Phases are separated by a barrier, so a worker only ever reads
a neighbour's interior while nobody is writing interiors.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from swexner.boundary import SIDES, apply_bcs, normalize_bcs
from swexner.errors import ConfigurationError, SolverError
from swexner.grid import Field, Grid
from swexner.solver import SAFETY, block_advance, block_dt, clip_dt

# direction -> (dcx, dcy)
DIRECTIONS = {
    "W": (-1, 0), "E": (1, 0), "S": (0, -1), "N": (0, 1),
    "SW": (-1, -1), "SE": (1, -1), "NW": (-1, 1), "NE": (1, 1),
}
_SIDE_OF = {"W": "west", "E": "east", "S": "south", "N": "north"}


@dataclass(frozen=True)
class Topology:
    px: int
    py: int
    periodic_x: bool = False
    periodic_y: bool = False

    @property
    def size(self) -> int:
        return self.px * self.py

    def coords(self, rank: int) -> tuple[int, int]:
        return rank % self.px, rank // self.px

    def rank_of(self, cx: int, cy: int) -> int | None:
        if self.periodic_x:
            cx %= self.px
        if self.periodic_y:
            cy %= self.py
        if not (0 <= cx < self.px and 0 <= cy < self.py):
            return None
        return cy * self.px + cx

    def neighbors(self, rank: int) -> dict:
        """Neighbour rank per direction, ``None`` at a physical boundary."""
        cx, cy = self.coords(rank)
        return {d: self.rank_of(cx + dx, cy + dy) for d, (dx, dy) in DIRECTIONS.items()}


@dataclass
class Subdomain:
    rank: int
    coords: tuple
    i0: int
    i1: int
    j0: int
    j1: int
    neighbors: dict
    P: np.ndarray | None = dc_field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.j1 - self.j0, self.i1 - self.i0)

    @property
    def physical_sides(self) -> tuple:
        return tuple(_SIDE_OF[d] for d in ("W", "E", "S", "N") if self.neighbors[d] is None)

    def interior(self) -> np.ndarray:
        return self.P[:, 1:-1, 1:-1]


def block_sizes(n: int, p: int) -> list[int]:
    """Split ``n`` cells over ``p`` workers; the remainder goes to the lowest ranks."""
    if p < 1 or p > n:
        raise ConfigurationError(f"cannot split {n} cells over {p} workers")
    base, rem = divmod(n, p)
    return [base + (1 if k < rem else 0) for k in range(p)]


def _offsets(sizes):
    return np.concatenate([[0], np.cumsum(sizes)]).astype(int)


def partition(grid: Grid, px: int, py: int = 1, periodic_x: bool = False,
              periodic_y: bool = False) -> list[Subdomain]:
    if grid.dim == 1 and py != 1:
        raise ConfigurationError("a 1D grid can only be split along x")
    ox = _offsets(block_sizes(grid.nx, px))
    oy = _offsets(block_sizes(grid.ny, py))
    topo = Topology(px, py, periodic_x, periodic_y)
    subs = []
    for rank in range(topo.size):
        cx, cy = topo.coords(rank)
        subs.append(Subdomain(rank, (cx, cy), int(ox[cx]), int(ox[cx + 1]), int(oy[cy]), int(oy[cy + 1]),
                              topo.neighbors(rank)))
    return subs


def scatter(field: Field, subs: list[Subdomain]) -> list[Subdomain]:
    q = field.stacked()
    for s in subs:
        ny, nx = s.shape
        s.P = np.zeros((4, ny + 2, nx + 2))
        s.P[:, 1:-1, 1:-1] = q[:, s.j0:s.j1, s.i0:s.i1]
    return subs


def gather(grid: Grid, subs: list[Subdomain]) -> Field:
    q = np.empty((4, grid.ny, grid.nx))
    for s in subs:
        q[:, s.j0:s.j1, s.i0:s.i1] = s.interior()
    return Field.from_stacked(grid, q)


def exchange_one(sub: Subdomain, subs: list[Subdomain], bcs: dict, corners: bool = True) -> None:
    """Fill the ghost frame of ``sub`` from neighbour interiors and physical BCs."""
    P = sub.P
    nb = sub.neighbors
    if nb["W"] is not None:
        P[:, 1:-1, 0] = subs[nb["W"]].P[:, 1:-1, -2]
    if nb["E"] is not None:
        P[:, 1:-1, -1] = subs[nb["E"]].P[:, 1:-1, 1]
    if nb["S"] is not None:
        P[:, 0, 1:-1] = subs[nb["S"]].P[:, -2, 1:-1]
    if nb["N"] is not None:
        P[:, -1, 1:-1] = subs[nb["N"]].P[:, 1, 1:-1]
    if corners:
        for d, (gj, gi, sj, si) in (("SW", (0, 0, -2, -2)), ("SE", (0, -1, -2, 1)),
                                     ("NW", (-1, 0, 1, -2)), ("NE", (-1, -1, 1, 1))):
            if nb[d] is not None:
                P[:, gj, gi] = subs[nb[d]].P[:, sj, si]
    apply_bcs(P, bcs, sub.physical_sides)


def halo_exchange(subs: list[Subdomain], bcs: dict, corners: bool = True) -> list[Subdomain]:
    for s in subs:
        exchange_one(s, subs, bcs, corners)
    return subs


def global_dt(local_dts) -> float:
    vals = list(local_dts)
    if not vals:
        raise ValueError("global_dt needs at least one local time step")
    return min(vals)


def default_layout(workers: int, dim: int) -> tuple[int, int]:
    """Most square ``px x py`` factorisation (``px >= py``) of the worker count."""
    if workers < 1:
        raise ConfigurationError("worker count must be >= 1")
    if dim == 1:
        return workers, 1
    py = int(math.isqrt(workers))
    while workers % py:
        py -= 1
    return workers // py, py


@dataclass
class RankTiming:
    rank: int
    steps: int = 0
    compute_s: float = 0.0
    exchange_s: float = 0.0


@dataclass
class TimingReport:
    workers: int
    layout: tuple
    wall_s: float
    steps: int
    ranks: list

    def to_csv(self) -> str:
        rows = ["rank,steps,compute_s,exchange_s"]
        rows += [f"{r.rank},{r.steps},{r.compute_s:.6f},{r.exchange_s:.6f}" for r in self.ranks]
        return "\n".join(rows) + "\n"


def run_parallel(scenario, workers=1, until: float | None = None, snapshot_times=(),
                 on_snapshot=None, corners: bool = True, safety: float = SAFETY,
                 h_dry: float = 1e-8, max_steps: int | None = None):
    """Run ``scenario`` on ``workers`` threads; returns ``(field, TimingReport)``.

    ``workers`` is a count or a ``(px, py)`` layout. ``on_snapshot(t, field)``
    receives the gathered global field at every requested time (t = 0
    included when listed).
    """
    grid = scenario.grid
    px, py = workers if isinstance(workers, tuple) else default_layout(int(workers), grid.dim)
    bcs = normalize_bcs(scenario.bcs, grid.dim)
    subs = scatter(scenario.field, partition(grid, px, py, bcs["west"].kind == "periodic",
                                             bcs["south"].kind == "periodic"))
    t_end = scenario.t_end if until is None else until
    params = scenario.law.kernel_params(scenario.g)
    stops = sorted(float(s) for s in snapshot_times)
    n = len(subs)
    dts = [0.0] * n
    timings = [RankTiming(s.rank) for s in subs]
    barrier = threading.Barrier(n)
    errors = []
    state = {"t": 0.0, "steps": 0}

    if on_snapshot and stops and stops[0] <= 0.0:
        on_snapshot(0.0, gather(grid, subs))

    def worker(rank):
        sub = subs[rank]
        tm = timings[rank]
        origin = (sub.i0, sub.j0)
        t = 0.0
        steps = 0
        try:
            while t < t_end and (max_steps is None or steps < max_steps):
                c0 = time.perf_counter()
                exchange_one(sub, subs, bcs, corners)
                barrier.wait()
                c1 = time.perf_counter()
                dts[rank] = block_dt(sub.P, params, scenario.cfl, grid.dx, grid.dy, grid.dim, safety, h_dry)
                c2 = time.perf_counter()
                barrier.wait()
                c3 = time.perf_counter()
                dt, t = clip_dt(global_dt(dts), t, t_end, stops)
                sub.P[:, 1:-1, 1:-1] = block_advance(sub.P, params, dt, grid.dx, grid.dy, grid.dim,
                                                     safety, h_dry, origin)
                c4 = time.perf_counter()
                barrier.wait()
                c5 = time.perf_counter()
                steps += 1
                tm.compute_s += (c2 - c1) + (c4 - c3)
                tm.exchange_s += (c1 - c0) + (c3 - c2) + (c5 - c4)
                if rank == 0 and on_snapshot and t in stops:
                    on_snapshot(t, gather(grid, subs))
            tm.steps = steps
            if rank == 0:
                state["t"], state["steps"] = t, steps
        except threading.BrokenBarrierError:
            tm.steps = steps
        except Exception as exc:  # noqa: BLE001 - reported to the caller below
            errors.append((rank, exc))
            barrier.abort()

    t0 = time.perf_counter()
    if n == 1:
        worker(0)
    else:
        threads = [threading.Thread(target=worker, args=(r,), name=f"swexner-rank{r}") for r in range(n)]
        for th in threads:
            th.start()
        for th in threads:
            th.join()
    wall = time.perf_counter() - t0
    if errors:
        rank, exc = errors[0]
        raise SolverError(f"worker {rank} failed: {exc}") from exc
    report = TimingReport(n, (px, py), wall, state["steps"], timings)
    return gather(grid, subs), report

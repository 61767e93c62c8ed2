"""The three bedform experiments: 1D dune, 1D anti-dune and the 2D bump."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.optimize import brentq

from swexner.bedload import BedloadLaw
from swexner.boundary import (BoundarySpec, FreeOutflow, Inflow, Periodic, Wall,  # noqa: F401
                              apply_bcs, normalize_bcs)
from swexner.errors import ConfigurationError
from swexner.grid import G, Field, Grid, make_grid

SCENARIOS = ("dune1d", "antidune1d", "bump2d")


@dataclass
class Scenario:
    name: str
    grid: Grid
    field: Field
    law: BedloadLaw
    bcs: dict
    t_end: float
    cfl: float = 0.5
    g: float = G
    snapshot_times: tuple = ()
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if not self.t_end > 0:
            raise ConfigurationError("end time must be positive")
        if not 0 < self.cfl <= 1:
            raise ConfigurationError("cfl must lie in (0, 1]")
        self.bcs = normalize_bcs(self.bcs, self.grid.dim)
        for side, spec in self.bcs.items():
            if self.grid.dim == 1 and side in ("south", "north"):
                continue
            if spec.kind == "inflow" and not np.isfinite(spec.q0):
                raise ConfigurationError(f"inflow on {side} needs a finite q0")

    def with_periodic_x(self) -> "Scenario":
        bcs = dict(self.bcs, west=Periodic(), east=Periodic())
        return Scenario(self.name, self.grid, self.field.copy(), self.law, bcs, self.t_end,
                        self.cfl, self.g, self.snapshot_times, dict(self.meta))


def dune_bed(x):
    x = np.asarray(x, dtype=float)
    hump = np.sin((x - 300.0) * np.pi / 200.0) ** 2
    return np.where((x >= 300.0) & (x <= 500.0), 0.1 + hump, 0.1)


def build_dune_1d(J: int = 2000, A_g: float = 1.0, m_g: float = 3.0, t_end: float = 700.0,
                  q0: float = 10.0, cfl: float = 0.5, g: float = G) -> Scenario:
    if J < 10:
        raise ConfigurationError("dune scenario needs J >= 10")
    grid = make_grid(1, 1000.0, J)
    zb = dune_bed(grid.x_centers())
    h = 10.0 - zb
    field = Field(grid, h, np.full_like(h, q0), zb=zb)
    bcs = {"west": Inflow(q0), "east": FreeOutflow()}
    return Scenario("dune1d", grid, field, BedloadLaw.grass(A_g, m_g), bcs, t_end, cfl, g)


def antidune_bed(x):
    x = np.asarray(x, dtype=float)
    return np.where((x >= 8.0) & (x <= 12.0), 0.2 - 0.05 * (x - 10.0) ** 2, 0.0)


def critical_depth(q0: float, g: float = G) -> float:
    return (q0 * q0 / g) ** (1.0 / 3.0)


def total_head(q0: float, h0: float, z0: float = 0.0, g: float = G) -> float:
    return q0 * q0 / (2.0 * g * h0 * h0) + h0 + z0


def bernoulli_profile(q0: float, h0: float, zb, g: float = G, z0: float | None = None):
    """Supercritical depth satisfying ``q0^2/(2 g h^2) + h + zb = H0`` per cell.

    ``H0`` is the head of the inflow state (``h0`` over bed ``z0``, by default
    the first entry of ``zb``). Where the available head is below the minimum
    specific energy the cell is choked: it gets the critical depth and is
    flagged. Returns ``(h, choked)``.
    """
    zb = np.atleast_1d(np.asarray(zb, dtype=float))
    if not q0 > 0:
        raise ConfigurationError("q0 must be positive")
    hc = critical_depth(q0, g)
    if not 0 < h0 < hc:
        raise ConfigurationError(f"inflow depth {h0} is not supercritical (critical depth {hc:.6g})")
    H0 = total_head(q0, h0, zb[0] if z0 is None else z0, g)
    e_min = 1.5 * hc
    k = q0 * q0 / (2.0 * g)

    def energy_gap(hh, z):
        return k / (hh * hh) + hh + z - H0

    h = np.empty_like(zb)
    choked = H0 - zb < e_min
    for i, z in enumerate(zb):
        if choked[i]:
            h[i] = hc
            continue
        if energy_gap(hc, z) == 0.0:
            h[i] = hc
            continue
        # energy_gap decreases on (0, hc) from +inf to e_min - (H0 - z) <= 0
        lo = np.sqrt(k / (H0 - z + 1.0))
        h[i] = brentq(energy_gap, lo, hc, args=(z,), xtol=1e-15, rtol=1e-15, maxiter=200)
    if choked.any():
        warnings.warn(f"{int(choked.sum())} choked cell(s) set to critical depth {hc:.6g} m", stacklevel=2)
    return h, choked


def build_antidune_1d(J: int = 2400, A_g: float = 0.001, m_g: float = 3.0, t_end: float = 50.0,
                      q0: float = 1.7, h0: float = 0.5, cfl: float = 0.5, g: float = G) -> Scenario:
    if J < 10:
        raise ConfigurationError("anti-dune scenario needs J >= 10")
    grid = make_grid(1, 24.0, J)
    zb = antidune_bed(grid.x_centers())
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        h, choked = bernoulli_profile(q0, h0, zb, g, z0=float(antidune_bed(0.0)))
    for w in caught:
        warnings.warn(w.message, stacklevel=2)
    field = Field(grid, h, np.full_like(h, q0), zb=zb)
    bcs = {"west": Inflow(q0, h0), "east": FreeOutflow()}
    return Scenario("antidune1d", grid, field, BedloadLaw.grass(A_g, m_g), bcs, t_end, cfl, g,
                    snapshot_times=(0.0, 6.0, 10.0, 15.0, 30.0, 50.0),
                    meta={"choked": choked, "H0": total_head(q0, h0, 0.0, g)})


def bump_bed(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    inside = (x >= 300.0) & (x <= 500.0) & (y >= 400.0) & (y <= 600.0)
    hump = np.sin(np.pi * (x - 300.0) / 200.0) ** 2 * np.sin(np.pi * (y - 400.0) / 200.0) ** 2
    return np.where(inside, 0.1 + hump, 0.1)


def build_bump_2d(J: int = 200, K: int = 200, A_g: float = 1.0, m_g: float = 3.0,
                  t_end: float | None = None, q0: float = 10.0, cfl: float = 0.5, g: float = G) -> Scenario:
    if J < 10 or K < 10:
        raise ConfigurationError("2D bump scenario needs J, K >= 10")
    if t_end is None:
        t_end = 1000.0 if A_g == 0.1 else 500.0
    grid = make_grid(2, (1000.0, 1000.0), (J, K))
    X, Y = grid.meshgrid()
    zb = bump_bed(X, Y)
    h = 10.0 - zb
    field = Field(grid, h, np.full_like(h, q0), np.zeros_like(h), zb)
    bcs = {"west": Inflow(q0), "east": FreeOutflow(), "south": FreeOutflow(), "north": FreeOutflow()}
    return Scenario("bump2d", grid, field, BedloadLaw.grass(A_g, m_g), bcs, t_end, cfl, g)


def build(name: str, **kw) -> Scenario:
    builders = {"dune1d": build_dune_1d, "antidune1d": build_antidune_1d, "bump2d": build_bump_2d}
    if name not in builders:
        raise ConfigurationError(f"unknown scenario {name!r}; expected one of {SCENARIOS}")
    return builders[name](**kw)

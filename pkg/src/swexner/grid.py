"""Uniform 1D/2D cell-centred grids and the per-cell flow fields living on them.

Fields are stored as structure-of-arrays with shape ``(ny, nx)``, x index
fastest (row-major); a 1D grid is simply ``ny == 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

import numpy as np

from swexner.errors import ConfigurationError

G = 9.81
H_DRY = 1e-8


@dataclass(frozen=True)
class Grid:
    dim: int
    extent_x: float
    extent_y: float
    nx: int
    ny: int

    @property
    def dx(self) -> float:
        return self.extent_x / self.nx

    @property
    def dy(self) -> float:
        return self.extent_y / self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def ncells(self) -> int:
        return self.nx * self.ny

    def x_centers(self) -> np.ndarray:
        return (np.arange(self.nx) + 0.5) * self.dx

    def y_centers(self) -> np.ndarray:
        return (np.arange(self.ny) + 0.5) * self.dy

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-centre coordinates with shape ``(ny, nx)``."""
        return np.meshgrid(self.x_centers(), self.y_centers())


def make_grid(dim: int, extents, counts) -> Grid:
    """Build a uniform grid.

    ``extents`` and ``counts`` are scalars in 1D or pairs ``(x, y)`` in 2D.
    """
    if dim not in (1, 2):
        raise ConfigurationError(f"dim must be 1 or 2, got {dim}")
    ext = np.atleast_1d(np.asarray(extents, dtype=float))
    cnt = np.atleast_1d(np.asarray(counts))
    if len(ext) != dim or len(cnt) != dim:
        raise ConfigurationError(f"expected {dim} extent(s) and count(s)")
    if np.any(~np.isfinite(ext)) or np.any(ext <= 0):
        raise ConfigurationError(f"extents must be positive, got {ext.tolist()}")
    if np.any(cnt < 1) or np.any(cnt != np.floor(cnt)):
        raise ConfigurationError(f"cell counts must be integers >= 1, got {cnt.tolist()}")
    if dim == 1:
        return Grid(1, float(ext[0]), 1.0, int(cnt[0]), 1)
    return Grid(2, float(ext[0]), float(ext[1]), int(cnt[0]), int(cnt[1]))


class FlowState(NamedTuple):
    """Conserved variables of one cell (or broadcastable arrays of cells)."""

    h: float
    hu: float
    hv: float = 0.0
    zb: float = 0.0


def primitives(cell: FlowState, h_dry: float = H_DRY):
    """Return ``(h, u, v, zb)``; velocities are zeroed where ``h <= h_dry``."""
    h = np.asarray(cell.h, dtype=float)
    wet = h > h_dry
    safe_h = np.where(wet, h, 1.0)
    u = np.where(wet, np.asarray(cell.hu, dtype=float) / safe_h, 0.0)
    v = np.where(wet, np.asarray(cell.hv, dtype=float) / safe_h, 0.0)
    if u.ndim == 0:
        return float(h), float(u), float(v), float(cell.zb)
    return h, u, v, np.asarray(cell.zb, dtype=float)


def conserved(h, u, v=0.0, zb=0.0) -> FlowState:
    return FlowState(h, np.multiply(h, u), np.multiply(h, v), zb)


@dataclass
class Field:
    grid: Grid
    h: np.ndarray
    hu: np.ndarray
    hv: np.ndarray = dc_field(default=None)
    zb: np.ndarray = dc_field(default=None)

    def __post_init__(self):
        shape = self.grid.shape
        self.h = _as_cells(self.h, shape, "h")
        self.hu = _as_cells(self.hu, shape, "hu")
        self.hv = np.zeros(shape) if self.hv is None else _as_cells(self.hv, shape, "hv")
        self.zb = np.zeros(shape) if self.zb is None else _as_cells(self.zb, shape, "zb")

    def copy(self) -> "Field":
        return Field(self.grid, self.h.copy(), self.hu.copy(), self.hv.copy(), self.zb.copy())

    def stacked(self) -> np.ndarray:
        """Variables stacked as ``(4, ny, nx)`` in the order h, hu, hv, zb."""
        return np.stack([self.h, self.hu, self.hv, self.zb])

    @classmethod
    def from_stacked(cls, grid: Grid, q: np.ndarray) -> "Field":
        return cls(grid, q[0].copy(), q[1].copy(), q[2].copy(), q[3].copy())

    def cell(self, i: int, j: int = 0) -> FlowState:
        return FlowState(self.h[j, i], self.hu[j, i], self.hv[j, i], self.zb[j, i])

    def primitives(self, h_dry: float = H_DRY):
        return primitives(FlowState(self.h, self.hu, self.hv, self.zb), h_dry)

    def water_volume(self) -> float:
        return float(np.sum(self.h) * self.grid.dx * self.grid.dy)

    def sediment_volume(self) -> float:
        return float(np.sum(self.zb) * self.grid.dx * self.grid.dy)

    def check(self) -> None:
        for name in ("h", "hu", "hv", "zb"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"non-finite values in {name}")
        if np.any(self.h < 0):
            raise ValueError("negative water depth")


def _as_cells(a, shape, name) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim == 0:
        return np.full(shape, float(arr))
    if arr.size != shape[0] * shape[1]:
        raise ConfigurationError(f"{name} has {arr.size} values, grid has {shape[0] * shape[1]} cells")
    return arr.reshape(shape)

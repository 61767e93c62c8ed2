"""Boundary conditions filling the one-cell ghost frame of a padded block.

A padded block has shape ``(4, ny + 2, nx + 2)`` with variables
``h, hu, hv, zb``; x = 0 is the ``west`` side and y = 0 the ``south`` side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from swexner.errors import ConfigurationError

SIDES = ("west", "east", "south", "north")
BC_KINDS = ("inflow", "outflow", "periodic", "wall")

# (axis of the normal momentum in the variable stack, inflow sign)
_NORMAL = {"west": (1, 1.0), "east": (1, -1.0), "south": (2, 1.0), "north": (2, -1.0)}


@dataclass(frozen=True)
class BoundarySpec:
    kind: str = "outflow"
    q0: float | None = None
    h0: float | None = None

    def __post_init__(self):
        if self.kind not in BC_KINDS:
            raise ConfigurationError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "inflow":
            if self.q0 is None or not np.isfinite(self.q0):
                raise ConfigurationError("inflow boundary needs a finite discharge q0")
            if self.h0 is not None and not self.h0 > 0:
                raise ConfigurationError("inflow depth h0 must be positive")

    @property
    def supercritical(self) -> bool:
        return self.kind == "inflow" and self.h0 is not None


def Inflow(q0: float, h0: float | None = None) -> BoundarySpec:
    return BoundarySpec("inflow", q0, h0)


def FreeOutflow() -> BoundarySpec:
    return BoundarySpec("outflow")


def Periodic() -> BoundarySpec:
    return BoundarySpec("periodic")


def Wall() -> BoundarySpec:
    return BoundarySpec("wall")


def normalize_bcs(bcs, dim: int = 2) -> dict:
    """Fill unspecified sides with free outflow and validate periodic pairing."""
    out = {side: FreeOutflow() for side in SIDES}
    out.update(bcs or {})
    for side in out:
        if side not in SIDES:
            raise ConfigurationError(f"unknown boundary side {side!r}")
    for a, b in (("west", "east"), ("south", "north")):
        if (out[a].kind == "periodic") != (out[b].kind == "periodic"):
            raise ConfigurationError(f"periodic boundaries must pair {a}/{b}")
    if dim == 1:
        out["south"] = out["north"] = FreeOutflow()
    return out


def _slices(side):
    # (ghost index, adjacent interior index, opposite interior index, axis)
    if side == "west":
        return 0, 1, -2, 2
    if side == "east":
        return -1, -2, 1, 2
    if side == "south":
        return 0, 1, -2, 1
    return -1, -2, 1, 1


def _take(P, idx, axis, span):
    if axis == 2:
        return P[:, span, idx]
    return P[:, idx, span]


def _put(P, idx, axis, span, values):
    if axis == 2:
        P[:, span, idx] = values
    else:
        P[:, idx, span] = values


def fill_side(P: np.ndarray, side: str, spec: BoundarySpec) -> None:
    ghost, inner, opposite, axis = _slices(side)
    # x sides cover interior rows; y sides cover the full width incl. corners
    span = slice(1, -1) if axis == 2 else slice(None)
    if spec.kind == "periodic":
        _put(P, ghost, axis, span, _take(P, opposite, axis, span))
        return
    vals = _take(P, inner, axis, span).copy()
    n_var, sign = _NORMAL[side]
    t_var = 3 - n_var
    if spec.kind == "wall":
        vals[n_var] = -vals[n_var]
    elif spec.kind == "inflow":
        vals[n_var] = sign * spec.q0
        vals[t_var] = 0.0
        if spec.h0 is not None:
            vals[0] = spec.h0
    _put(P, ghost, axis, span, vals)


def apply_bcs(P: np.ndarray, bcs: dict, sides=SIDES) -> np.ndarray:
    """Fill ghost cells of the requested physical sides in place; returns ``P``.

    x sides are filled before y sides so that corners are defined.
    """
    for side in SIDES:
        if side in sides:
            spec = bcs.get(side, FreeOutflow())
            if not isinstance(spec, BoundarySpec):
                raise ConfigurationError(f"boundary for {side} is not a BoundarySpec: {spec!r}")
            fill_side(P, side, spec)
    return P

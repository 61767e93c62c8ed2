"""Coupled shallow-water / Exner bedload simulator on structured grids."""

from swexner.errors import ConfigurationError, SolverError
from swexner.grid import G, H_DRY, Field, FlowState, Grid, make_grid, primitives

__version__ = "0.1.0"

__all__ = [
    "G",
    "H_DRY",
    "ConfigurationError",
    "SolverError",
    "Field",
    "FlowState",
    "Grid",
    "make_grid",
    "primitives",
]

r"""First-order relaxation solver for the shallow-water / Exner system.

Relaxation model
----------------
Each step starts from physical data and sets the auxiliary variables to
equilibrium, ``Pi = g H^2 / 2`` and ``Omega = Q_s(H, Hu)``. The homogeneous
relaxation system

    H_t + (Hu)_x = 0
    (Hu)_t + (Hu^2 + Pi)_x + g H Z_x = 0
    Pi_t + u Pi_x + (a^2 / H) u_x = 0
    Z_t + Omega_x = 0
    Omega_t + (b^2 / H^2 - u^2) Z_x + 2u Omega_x = 0

is then solved at every interface and the cell averages of the Riemann fans
give the new (h, hu, z_b). Neither the relaxation parameter nor the
auxiliary variables survive the step.

Interface solution
------------------
The matrix of the homogeneous system is block lower-triangular: the
(Z, Omega) block involves no derivative of the fluid variables, and the fluid
block only sees Z through the non-conservative product ``g H Z_x``.

Fluid block. Without the bed term this is the Suliciu system. With one
celerity ``a`` per interface its waves are ``u_L - a/H_L``, the contact
``u*`` and ``u_R + a/H_R``, with

    u*  = (u_L + u_R)/2 - (Pi_R - Pi_L) / (2a)
    Pi* = (Pi_L + Pi_R)/2 - a (u_R - u_L) / 2
    1/H*_L = 1/H_L + (u* - u_L)/a,   1/H*_R = 1/H_R + (u_R - u*)/a

(Riemann invariants ``u +- a/H`` and ``Pi -+ a u`` across the outer waves,
``u`` and ``Pi`` across the contact). If a star depth is not positive the
celerity is doubled and the solve repeated.

Solid block. With the coefficients frozen per side, the block is the
classical two-speed relaxation of a scalar law whose waves are
``u -+ b/H``. Taking the extreme speeds ``S_L = min(u - b/H)`` and
``S_R = max(u + b/H)`` over both sides, the intermediate state satisfies the
jump relations across both waves:

    Z*     = (S_R Z_R - S_L Z_L - (Omega_R - Omega_L)) / (S_R - S_L)
    Omega* = (S_R Omega_L - S_L Omega_R + S_L S_R (Z_R - Z_L)) / (S_R - S_L)

``Omega*`` is the sediment flux. Because ``b >= |Hu|`` we always have
``S_L <= 0 <= S_R``.

Bed term. Z only jumps across the two solid waves, so over the fan

    int g H dZ = g H(S_L) (Z* - Z_L) + g H(S_R) (Z_R - Z*)

where ``H(s)`` is the fluid-fan depth sampled at speed ``s`` (mean of both
sides when ``s`` hits a fluid wave). Integrating the momentum equation over
each half of the fan, the contribution of a wave travelling left is charged
to the left cell and one travelling right to the right cell (half each at
speed 0). The left cell therefore sees the momentum flux
``F(0) + sum_{s<0} g H dZ`` and the right cell ``F(0) - sum_{s>0} g H dZ``.
When no sediment can move on either side (``Omega`` and ``dQ_s/du`` vanish,
or ``b`` is below 1e-12) the solid waves are suppressed: the bed jump is a
stationary contact at ``xi = 0`` and is split evenly.

Properties: the H and Z fluxes are single valued, so water and sediment
volumes are conserved; equal equilibrium states return the physical fluxes;
without transport the scheme is exactly the Suliciu solver. Lake-at-rest
states are not preserved, since ``u*`` is driven by the pressure jump.

Multi-dimensional update
------------------------
The 2D update is unsplit: the same face-normal solver runs on every x- and
y-face, and the transverse momentum is carried by the mass flux, upwinded on
its sign. The sediment flux uses the normal component of the bedload vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from swexner import kernels
from swexner.bedload import BedloadLaw, dimensional_flux, flux_du
from swexner.boundary import apply_bcs, normalize_bcs
from swexner.errors import SolverError
from swexner.grid import G, H_DRY, Field, FlowState, primitives

SAFETY = 1.05


@dataclass(frozen=True)
class RelaxState:
    H: float
    Hu: float
    Pi: float
    Z: float
    Omega: float
    dQs_du: float = 0.0

    @property
    def u(self) -> float:
        return self.Hu / self.H if self.H > H_DRY else 0.0


@dataclass(frozen=True)
class CelerityPair:
    a: float
    b: float


@dataclass(frozen=True)
class InterfaceSolution:
    flux_h: float
    flux_z: float
    flux_hu_left: float
    flux_hu_right: float
    flux_hu: float
    u_star: float
    pi_star: float
    h_star_left: float
    h_star_right: float
    z_star: float
    omega_star: float
    speeds: tuple
    a: float
    solid_active: bool


def equilibrate(flow: FlowState, law: BedloadLaw, g: float = G, h_dry: float = H_DRY) -> RelaxState:
    h, u, _, zb = primitives(flow, h_dry)
    q, dq = flux_du(law, h, u, g, h_dry) if h > h_dry else (0.0, 0.0)
    return RelaxState(float(h), float(flow.hu), 0.5 * g * h * h, float(zb), float(q), float(dq))


def celerity_bounds(left: RelaxState, right: RelaxState, law: BedloadLaw = None,
                    safety: float = SAFETY, g: float = G, h_dry: float = H_DRY) -> CelerityPair:
    """Celerities ``a >= H sqrt(gH)`` and ``b >= sqrt((Hu)^2 + g H^2 dQ_s/du)``.

    ``law`` is only used to recompute ``dQ_s/du`` when it is not stored on the
    states.
    """
    def sides(st):
        if st.H <= h_dry:
            return 0.0, 0.0
        dq = st.dQs_du
        if law is not None and dq == 0.0:
            dq = float(flux_du(law, st.H, st.u, g, h_dry)[1])
        return st.H * np.sqrt(g * st.H), np.sqrt(max(st.Hu ** 2 + g * st.H ** 2 * dq, 0.0))

    aL, bL = sides(left)
    aR, bR = sides(right)
    return CelerityPair(float(safety * max(aL, aR)), float(safety * max(bL, bR)))


def interface_riemann(left: RelaxState, right: RelaxState, cel: CelerityPair, g: float = G,
                      h_dry: float = H_DRY) -> InterfaceSolution:
    def side(st):
        wet = st.H > h_dry
        return st.H, st.u, 1.0 / (st.H if wet else h_dry), st.Pi, st.Z, st.Omega, st.dQs_du

    arr = [np.array([x], dtype=float) for x in side(left) + side(right)]
    sol = kernels.riemann_numpy(*arr, np.array([cel.a]), np.array([cel.b]), g)
    if sol["failed"][0]:
        raise SolverError("relaxation Riemann problem has no positive star depth")
    fn = float(sol["fn"][0])
    return InterfaceSolution(
        flux_h=float(sol["fh"][0]),
        flux_z=float(sol["fz"][0]),
        flux_hu_left=fn + float(sol["nc_left"][0]),
        flux_hu_right=fn - float(sol["nc_right"][0]),
        flux_hu=fn,
        u_star=float(sol["u_star"][0]),
        pi_star=float(sol["pi_star"][0]),
        h_star_left=float(sol["h_star_left"][0]),
        h_star_right=float(sol["h_star_right"][0]),
        z_star=float(sol["z_star"][0]),
        omega_star=float(sol["omega_star"][0]),
        speeds=tuple(float(s[0]) for s in sol["speeds"]),
        a=float(sol["a"][0]),
        solid_active=bool(sol["active"][0]),
    )


# ---------------------------------------------------------------------------
# padded-block primitives shared by the serial and parallel drivers
# ---------------------------------------------------------------------------

def pad(field: Field) -> np.ndarray:
    ny, nx = field.grid.shape
    P = np.zeros((4, ny + 2, nx + 2))
    P[:, 1:-1, 1:-1] = field.stacked()
    return P


def _x_rows(P):
    return P[0, 1:-1, :], P[1, 1:-1, :], P[2, 1:-1, :], P[3, 1:-1, :]


def _y_rows(P):
    t = lambda a: np.ascontiguousarray(a[:, 1:-1].T)  # noqa: E731
    return t(P[0]), t(P[2]), t(P[1]), t(P[3])


def block_dt(P: np.ndarray, params: np.ndarray, cfl: float, dx: float, dy: float, dim: int,
             safety: float = SAFETY, h_dry: float = H_DRY) -> float:
    """CFL time step of one padded block (ghosts must be filled)."""
    sx = kernels.max_speed(*_x_rows(P)[:3], params, safety, h_dry)
    dt = cfl * dx / sx if sx > 0 else np.inf
    if dim == 2:
        sy = kernels.max_speed(*_y_rows(P)[:3], params, safety, h_dry)
        if sy > 0:
            dt = min(dt, cfl * dy / sy)
    return dt


def _increments(rows, params, lam, safety, h_dry):
    fh, fl, fr, ft, fz, nfailed = kernels.sweep_fluxes(*rows, params, safety, h_dry)
    if nfailed:
        raise SolverError(f"{nfailed} interface(s) without positive star depth after celerity retries")
    return (-lam * (fh[:, 1:] - fh[:, :-1]),
            -lam * (fl[:, 1:] - fr[:, :-1]),
            -lam * (ft[:, 1:] - ft[:, :-1]),
            -lam * (fz[:, 1:] - fz[:, :-1]))


def block_advance(P: np.ndarray, params: np.ndarray, dt: float, dx: float, dy: float, dim: int,
                  safety: float = SAFETY, h_dry: float = H_DRY, origin=(0, 0)) -> np.ndarray:
    """One Godunov step of a padded block; returns the new interior ``(4, ny, nx)``."""
    dh, dn, dt_, dz = _increments(_x_rows(P), params, dt / dx, safety, h_dry)
    d = np.stack([dh, dn, dt_, dz])
    if dim == 2:
        eh, en, et, ez = _increments(_y_rows(P), params, dt / dy, safety, h_dry)
        d = d + np.stack([eh.T, et.T, en.T, ez.T])
    new = P[:, 1:-1, 1:-1] + d
    if np.any(new[0] < 0) or not np.all(np.isfinite(new)):
        bad = np.argwhere((new[0] < 0) | ~np.all(np.isfinite(new), axis=0))[0]
        j, i = int(bad[0]) + origin[1], int(bad[1]) + origin[0]
        raise SolverError(f"negative or non-finite depth at cell (i={i}, j={j}); CFL or celerity bound violated")
    return new


# ---------------------------------------------------------------------------
# Field-level API
# ---------------------------------------------------------------------------

def _padded(field: Field, bcs):
    P = pad(field)
    apply_bcs(P, normalize_bcs(bcs, field.grid.dim))
    return P


def cfl_dt(field: Field, law: BedloadLaw, cfl: float = 0.5, g: float = G, safety: float = SAFETY,
           h_dry: float = H_DRY, bcs=None) -> float:
    """Explicit time step ``cfl * min(dx / speed)`` over cells and interfaces.

    Cell speeds use the smallest admissible celerities; interface speeds use
    the celerities actually applied there. Without ``bcs`` only interior
    interfaces are considered.
    """
    if not 0 < cfl <= 1:
        raise ValueError("cfl must lie in (0, 1]")
    if not np.any(field.h > h_dry):
        raise SolverError("cannot choose a time step on an all-dry field")
    params = law.kernel_params(g)
    grid = field.grid
    if bcs is not None:
        return block_dt(_padded(field, bcs), params, cfl, grid.dx, grid.dy, grid.dim, safety, h_dry)
    q = field.stacked()
    sx = max(_cell_speed(q[0], q[1], q[2], params, h_dry),
             kernels.max_speed(q[0], q[1], q[2], params, safety, h_dry))
    dt = cfl * grid.dx / sx
    if grid.dim == 2:
        qt = np.ascontiguousarray(q.transpose(0, 2, 1))
        sy = max(_cell_speed(qt[0], qt[2], qt[1], params, h_dry),
                 kernels.max_speed(qt[0], qt[2], qt[1], params, safety, h_dry))
        dt = min(dt, cfl * grid.dy / sy)
    return dt


def _cell_speed(h, hn, ht, params, h_dry):
    wet, tau, u, v, pi, om, dq, a_side, b_side = kernels._equilibrium_numpy(h, hn, ht, params, h_dry)
    return float(np.where(wet, np.abs(u) + np.maximum(a_side, b_side) * tau, 0.0).max(initial=0.0))


def step_1d(field: Field, law: BedloadLaw, dt: float, bcs=None, g: float = G,
            safety: float = SAFETY, h_dry: float = H_DRY) -> Field:
    grid = field.grid
    new = block_advance(_padded(field, bcs), law.kernel_params(g), dt, grid.dx, grid.dy, 1, safety, h_dry)
    return Field.from_stacked(grid, new)


def step_2d(field: Field, law: BedloadLaw, dt: float, bcs=None, g: float = G,
            safety: float = SAFETY, h_dry: float = H_DRY) -> Field:
    grid = field.grid
    new = block_advance(_padded(field, bcs), law.kernel_params(g), dt, grid.dx, grid.dy, 2, safety, h_dry)
    return Field.from_stacked(grid, new)


def step(field: Field, law: BedloadLaw, dt: float, bcs=None, **kw) -> Field:
    return (step_2d if field.grid.dim == 2 else step_1d)(field, law, dt, bcs, **kw)


def clip_dt(dt: float, t: float, t_end: float, stops=()) -> tuple[float, float]:
    """Shorten ``dt`` so that the step lands exactly on the next stop time.

    Returns ``(dt, t_new)``.
    """
    target = t_end
    for s in stops:
        if t < s < target:
            target = s
    if t + dt >= target:
        return target - t, target
    return dt, t + dt


def integrate(field: Field, law: BedloadLaw, t_end: float, bcs=None, cfl: float = 0.5,
              g: float = G, safety: float = SAFETY, h_dry: float = H_DRY,
              snapshot_times=(), on_snapshot=None, max_steps: int | None = None):
    """Serial time loop; returns ``(field, t, nsteps)``.

    ``on_snapshot(t, field)`` is called at t = 0 when requested and at each
    time in ``snapshot_times``.
    """
    grid = field.grid
    bcs = normalize_bcs(bcs, grid.dim)
    params = law.kernel_params(g)
    stops = sorted(float(s) for s in snapshot_times)
    P = pad(field)
    t = 0.0
    nsteps = 0
    if on_snapshot and stops and stops[0] <= 0.0:
        on_snapshot(0.0, field.copy())
    while t < t_end and (max_steps is None or nsteps < max_steps):
        apply_bcs(P, bcs)
        dt = block_dt(P, params, cfl, grid.dx, grid.dy, grid.dim, safety, h_dry)
        dt, t = clip_dt(dt, t, t_end, stops)
        P[:, 1:-1, 1:-1] = block_advance(P, params, dt, grid.dx, grid.dy, grid.dim, safety, h_dry)
        nsteps += 1
        if on_snapshot and t in stops:
            on_snapshot(t, Field.from_stacked(grid, P[:, 1:-1, 1:-1]))
    return Field.from_stacked(grid, P[:, 1:-1, 1:-1]), t, nsteps


def physical_fluxes(state: RelaxState):
    """Exact fluxes ``(Hu, Hu^2 + Pi, Omega)`` of an equilibrium state."""
    u = state.u
    return state.Hu, state.Hu * u + state.Pi, state.Omega


__all__ = [
    "RelaxState", "CelerityPair", "InterfaceSolution", "equilibrate", "celerity_bounds",
    "interface_riemann", "cfl_dt", "step_1d", "step_2d", "step", "integrate", "block_dt",
    "block_advance", "pad", "clip_dt", "dimensional_flux",
]

"""Hot loops of the relaxation solver: interface fluxes and signal speeds.

Two interchangeable backends compute the same quantities:

* a compiled one (numba ``@njit``), looping over interfaces one at a time;
* a vectorized pure-numpy one, used when numba is unavailable or when the
  environment variable ``SWEXNER_DISABLE_NUMBA`` is set to a true value.

Both operate on a block of rows padded by one ghost cell at each end of the
sweep axis: arrays ``h, hn, ht, z`` of shape ``(rows, n + 2)`` hold depth,
face-normal discharge, transverse discharge and bed level. Interface ``k``
lies between columns ``k`` and ``k + 1``.

The law is passed as the float vector from ``BedloadLaw.kernel_params``:
``[kind, A_g, m_g, tau_cr, d_s, s, friction_kind, friction_coef, g]``.
"""

from __future__ import annotations

import math
import os

import numpy as np

B_EPS = 1e-12
MAX_RETRIES = 8

_flag = os.environ.get("SWEXNER_DISABLE_NUMBA", "").strip().lower()
_numba_disabled = _flag not in ("", "0", "false", "no")

try:
    if _numba_disabled:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

def law_flux_numpy(h, un, ut, p, h_dry):
    """Face-normal bedload flux and its derivative in ``un`` (vectorized)."""
    kind = int(p[0])
    speed = np.sqrt(un * un + ut * ut)
    moving = (speed > 0) & (h > h_dry)
    sp = np.where(moving, speed, 1.0)
    if kind == 0:
        A, m = p[1], p[2]
        q = A * sp ** m
        dq = A * m * sp ** (m - 1.0)
    else:
        tau_cr, d_s, s, fk, coef, g = p[3], p[4], p[5], int(p[6]), p[7], p[8]
        hs = np.where(moving, h, 1.0)
        if fk == 0:
            hsf = coef * sp * sp / (8.0 * g)
        else:
            hsf = coef * coef * sp * sp / hs ** (1.0 / 3.0)
        tau = hsf / ((s - 1.0) * d_s)
        F, dF = _shields_numpy(kind, tau, tau_cr)
        K = math.sqrt((s - 1.0) * g * d_s ** 3)
        q = K * F
        dq = K * dF * (2.0 * tau / sp)
    qn = np.where(moving, q * (un / sp), 0.0)
    cn, ct = un / sp, ut / sp
    dqn = np.where(moving, dq * cn * cn + (q / sp) * ct * ct, 0.0)
    return qn, dqn


def _shields_numpy(kind, tau, tau_cr):
    ex = np.maximum(tau - tau_cr, 0.0)
    if kind == 1:
        return 8.0 * ex ** 1.5, 12.0 * ex ** 0.5
    if kind == 2:
        return 5.7 * ex ** 1.5, 8.55 * ex ** 0.5
    if kind == 3:
        rt = np.sqrt(tau)
        d = np.where(tau >= tau_cr, 12.0 * (ex / (2.0 * np.where(rt > 0, rt, 1.0)) + rt), 0.0)
        return 12.0 * rt * ex, np.where(tau > 0, d, 0.0)
    if kind == 4:
        return 11.0 * ex ** 1.65, 18.15 * ex ** 0.65
    pos = tau > 0
    ts = np.where(pos, tau, 1.0)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        F = np.where(pos, 12.0 * ts ** 1.5 * np.exp(-4.5 * tau_cr / ts), 0.0)
        dF = F * (1.5 / ts + 4.5 * tau_cr / (ts * ts))
    return F, np.where(pos & (F > 0), dF, 0.0)


def _equilibrium_numpy(h, hn, ht, p, h_dry):
    wet = h > h_dry
    hs = np.where(wet, h, h_dry)
    u = np.where(wet, hn / hs, 0.0)
    v = np.where(wet, ht / hs, 0.0)
    g = p[8]
    om, dq = law_flux_numpy(h, u, v, p, h_dry)
    pi = 0.5 * g * h * h
    a_side = h * np.sqrt(g * h)
    b_side = np.sqrt(np.maximum((h * u) ** 2 + g * h * h * dq, 0.0))
    return wet, 1.0 / hs, u, v, pi, om, dq, a_side, b_side


def riemann_numpy(hL, uL, tauL, piL, zL, omL, dqL, hR, uR, tauR, piR, zR, omR, dqR,
                  a, b, g, max_retries=MAX_RETRIES):
    """Relaxation Riemann solution at a batch of interfaces.

    Returns a dict of arrays: fluxes ``fh, fz, fn`` (conservative momentum
    flux at the interface), ``nc_left, nc_right`` (non-conservative momentum
    parts), star values, wave speeds, the celerity ``a`` actually used and a
    boolean ``failed`` mask.
    """
    a = np.array(a, dtype=float, copy=True)
    failed = np.zeros(a.shape, dtype=bool)
    inert = a <= 0.0
    a_safe = np.where(inert, 1.0, a)
    for _ in range(max_retries + 1):
        us = 0.5 * (uL + uR) - (piR - piL) / (2.0 * a_safe)
        ps = 0.5 * (piL + piR) - 0.5 * a_safe * (uR - uL)
        tls = tauL + (us - uL) / a_safe
        trs = tauR + (uR - us) / a_safe
        bad = ~inert & ~((tls > 0) & (trs > 0))
        if not bad.any():
            break
        a_safe = np.where(bad, 2.0 * a_safe, a_safe)
    else:
        failed = bad
    l1 = uL - a_safe * tauL
    l3 = uR + a_safe * tauR
    hls = 1.0 / np.where(tls > 0, tls, 1.0)
    hrs = 1.0 / np.where(trs > 0, trs, 1.0)

    # state at xi = 0
    h0 = np.select([l1 >= 0, us >= 0, l3 > 0], [hL, hls, hrs], hR)
    u0 = np.select([l1 >= 0, l3 <= 0], [uL, uR], us)
    p0 = np.select([l1 >= 0, l3 <= 0], [piL, piR], ps)
    fh = h0 * u0
    fn = fh * u0 + p0
    fh = np.where(inert, 0.0, fh)
    fn = np.where(inert, 0.0, fn)

    def depth_at(s):
        # ties at a discontinuity take the mean of both sides
        return np.select(
            [s < l1, s == l1, s < us, s == us, s < l3, s == l3],
            [hL, 0.5 * (hL + hls), hls, 0.5 * (hls + hrs), hrs, 0.5 * (hrs + hR)],
            hR,
        )

    active = (b > B_EPS) & ~((omL == 0) & (omR == 0) & (dqL == 0) & (dqR == 0)) & ~inert
    sl = np.minimum(uL - b * tauL, uR - b * tauR)
    sr = np.maximum(uL + b * tauL, uR + b * tauR)
    width = np.where(active, sr - sl, 1.0)
    fz = np.where(active, (sr * omL - sl * omR + sl * sr * (zR - zL)) / width, 0.0)
    zs = np.where(active, (sr * zR - sl * zL - (omR - omL)) / width, 0.5 * (zL + zR))

    c1 = g * depth_at(sl) * (zs - zL)
    c2 = g * depth_at(sr) * (zR - zs)
    w1 = np.where(sl < 0, 1.0, np.where(sl > 0, 0.0, 0.5))
    w2 = np.where(sr < 0, 1.0, np.where(sr > 0, 0.0, 0.5))
    nc_left = w1 * c1 + w2 * c2
    nc_right = (1.0 - w1) * c1 + (1.0 - w2) * c2
    c0 = 0.5 * (g * depth_at(np.zeros_like(us)) * (zR - zL))
    nc_left = np.where(active, nc_left, c0)
    nc_right = np.where(active, nc_right, c0)
    nc_left = np.where(inert, 0.0, nc_left)
    nc_right = np.where(inert, 0.0, nc_right)
    return dict(
        fh=fh, fn=fn, fz=fz, nc_left=nc_left, nc_right=nc_right,
        u_star=us, pi_star=ps, h_star_left=hls, h_star_right=hrs, z_star=zs, omega_star=fz,
        speeds=(l1, us, l3, sl, sr), a=np.where(inert, 0.0, a_safe), failed=failed, active=active,
    )


def sweep_fluxes_numpy(h, hn, ht, z, p, safety, h_dry):
    """Interface fluxes along axis 1 of a padded block (numpy backend).

    Returns ``(fh, fn_left, fn_right, ft, fz, nfailed)``, each flux of shape
    ``(rows, n + 1)``.
    """
    g = p[8]
    wet, tau, u, v, pi, om, dq, a_side, b_side = _equilibrium_numpy(h, hn, ht, p, h_dry)
    L, R = slice(None, -1), slice(1, None)
    a = safety * np.maximum(a_side[:, L], a_side[:, R])
    b = safety * np.maximum(b_side[:, L], b_side[:, R])
    sol = riemann_numpy(h[:, L], u[:, L], tau[:, L], pi[:, L], z[:, L], om[:, L], dq[:, L],
                        h[:, R], u[:, R], tau[:, R], pi[:, R], z[:, R], om[:, R], dq[:, R],
                        a, b, g)
    fh = sol["fh"]
    ft = fh * np.where(fh >= 0, v[:, L], v[:, R])
    fn = sol["fn"]
    return fh, fn + sol["nc_left"], fn - sol["nc_right"], ft, sol["fz"], int(sol["failed"].sum())


def max_speed_numpy(h, hn, ht, p, safety, h_dry):
    """Largest signal speed of the interior cells and of every interface."""
    wet, tau, u, v, pi, om, dq, a_side, b_side = _equilibrium_numpy(h, hn, ht, p, h_dry)
    cell = np.where(wet, np.abs(u) + np.maximum(a_side, b_side) * tau, 0.0)[:, 1:-1]
    L, R = slice(None, -1), slice(1, None)
    c = safety * np.maximum(np.maximum(a_side[:, L], a_side[:, R]), np.maximum(b_side[:, L], b_side[:, R]))
    face = np.maximum(np.abs(u[:, L]) + c * tau[:, L], np.abs(u[:, R]) + c * tau[:, R])
    face = np.where(wet[:, L] | wet[:, R], face, 0.0)
    return max(float(cell.max(initial=0.0)), float(face.max(initial=0.0)))


# ---------------------------------------------------------------------------
# compiled backend
# ---------------------------------------------------------------------------

@njit(nogil=True, cache=True)
def _shields_scalar(kind, tau, tau_cr):
    ex = tau - tau_cr
    if ex < 0.0:
        ex = 0.0
    if kind == 1:
        return 8.0 * ex ** 1.5, 12.0 * ex ** 0.5
    if kind == 2:
        return 5.7 * ex ** 1.5, 8.55 * ex ** 0.5
    if kind == 3:
        rt = math.sqrt(tau)
        if tau > 0.0 and tau >= tau_cr:
            return 12.0 * rt * ex, 12.0 * (ex / (2.0 * rt) + rt)
        return 12.0 * rt * ex, 0.0
    if kind == 4:
        return 11.0 * ex ** 1.65, 18.15 * ex ** 0.65
    if tau <= 0.0:
        return 0.0, 0.0
    F = 12.0 * tau ** 1.5 * math.exp(-4.5 * tau_cr / tau)
    if F == 0.0:
        return 0.0, 0.0
    return F, F * (1.5 / tau + 4.5 * tau_cr / (tau * tau))


@njit(nogil=True, cache=True)
def law_flux_scalar(h, un, ut, p, h_dry):
    speed = math.sqrt(un * un + ut * ut)
    if not (speed > 0.0 and h > h_dry):
        return 0.0, 0.0
    kind = int(p[0])
    if kind == 0:
        A = p[1]
        m = p[2]
        q = A * speed ** m
        dq = A * m * speed ** (m - 1.0)
    else:
        tau_cr = p[3]
        d_s = p[4]
        s = p[5]
        coef = p[7]
        g = p[8]
        if int(p[6]) == 0:
            hsf = coef * speed * speed / (8.0 * g)
        else:
            hsf = coef * coef * speed * speed / h ** (1.0 / 3.0)
        tau = hsf / ((s - 1.0) * d_s)
        F, dF = _shields_scalar(kind, tau, tau_cr)
        K = math.sqrt((s - 1.0) * g * d_s ** 3)
        q = K * F
        dq = K * dF * (2.0 * tau / speed)
    cn = un / speed
    ct = ut / speed
    qn = q * cn
    dqn = dq * cn * cn + (q / speed) * ct * ct
    return qn, dqn


@njit(nogil=True, cache=True)
def _cell_state(h, hn, ht, p, h_dry):
    g = p[8]
    if h > h_dry:
        tau = 1.0 / h
        u = hn / h
        v = ht / h
    else:
        tau = 1.0 / h_dry
        u = 0.0
        v = 0.0
    om, dq = law_flux_scalar(h, u, v, p, h_dry)
    pi = 0.5 * g * h * h
    a_side = h * math.sqrt(g * h)
    bb = (h * u) ** 2 + g * h * h * dq
    b_side = math.sqrt(bb) if bb > 0.0 else 0.0
    return tau, u, v, pi, om, dq, a_side, b_side


@njit(nogil=True, cache=True)
def _depth_at(s, l1, us, l3, hL, hls, hrs, hR):
    if s < l1:
        return hL
    if s == l1:
        return 0.5 * (hL + hls)
    if s < us:
        return hls
    if s == us:
        return 0.5 * (hls + hrs)
    if s < l3:
        return hrs
    if s == l3:
        return 0.5 * (hrs + hR)
    return hR


@njit(nogil=True, cache=True)
def _wave_weight(s):
    if s < 0.0:
        return 1.0
    if s > 0.0:
        return 0.0
    return 0.5


@njit(nogil=True, cache=True)
def sweep_fluxes_numba(h, hn, ht, z, p, safety, h_dry):
    rows, ncol = h.shape
    nf = ncol - 1
    fh_out = np.zeros((rows, nf))
    fl_out = np.zeros((rows, nf))
    fr_out = np.zeros((rows, nf))
    ft_out = np.zeros((rows, nf))
    fz_out = np.zeros((rows, nf))
    g = p[8]
    nfailed = 0
    for r in range(rows):
        tauL, uL, vL, piL, omL, dqL, aL, bL = _cell_state(h[r, 0], hn[r, 0], ht[r, 0], p, h_dry)
        for k in range(nf):
            hL = h[r, k]
            hR = h[r, k + 1]
            zL = z[r, k]
            zR = z[r, k + 1]
            tauR, uR, vR, piR, omR, dqR, aR, bR = _cell_state(hR, hn[r, k + 1], ht[r, k + 1], p, h_dry)
            a = safety * max(aL, aR)
            b = safety * max(bL, bR)
            if a > 0.0:
                ok = False
                for _ in range(MAX_RETRIES + 1):
                    us = 0.5 * (uL + uR) - (piR - piL) / (2.0 * a)
                    ps = 0.5 * (piL + piR) - 0.5 * a * (uR - uL)
                    tls = tauL + (us - uL) / a
                    trs = tauR + (uR - us) / a
                    if tls > 0.0 and trs > 0.0:
                        ok = True
                        break
                    a = 2.0 * a
                if not ok:
                    nfailed += 1
                    tls = tauL
                    trs = tauR
                l1 = uL - a * tauL
                l3 = uR + a * tauR
                hls = 1.0 / tls
                hrs = 1.0 / trs
                if l1 >= 0.0:
                    h0, u0, p0 = hL, uL, piL
                elif l3 <= 0.0:
                    h0, u0, p0 = hR, uR, piR
                elif us >= 0.0:
                    h0, u0, p0 = hls, us, ps
                else:
                    h0, u0, p0 = hrs, us, ps
                fh = h0 * u0
                fn = fh * u0 + p0
                active = b > B_EPS and not (omL == 0.0 and omR == 0.0 and dqL == 0.0 and dqR == 0.0)
                if active:
                    sl = min(uL - b * tauL, uR - b * tauR)
                    sr = max(uL + b * tauL, uR + b * tauR)
                    width = sr - sl
                    fz = (sr * omL - sl * omR + sl * sr * (zR - zL)) / width
                    zs = (sr * zR - sl * zL - (omR - omL)) / width
                    c1 = g * _depth_at(sl, l1, us, l3, hL, hls, hrs, hR) * (zs - zL)
                    c2 = g * _depth_at(sr, l1, us, l3, hL, hls, hrs, hR) * (zR - zs)
                    w1 = _wave_weight(sl)
                    w2 = _wave_weight(sr)
                    ncl = w1 * c1 + w2 * c2
                    ncr = (1.0 - w1) * c1 + (1.0 - w2) * c2
                else:
                    fz = 0.0
                    ncl = 0.5 * (g * _depth_at(0.0, l1, us, l3, hL, hls, hrs, hR) * (zR - zL))
                    ncr = ncl
                fh_out[r, k] = fh
                fl_out[r, k] = fn + ncl
                fr_out[r, k] = fn - ncr
                ft_out[r, k] = fh * (vL if fh >= 0.0 else vR)
                fz_out[r, k] = fz
            tauL, uL, vL, piL, omL, dqL, aL, bL = tauR, uR, vR, piR, omR, dqR, aR, bR
    return fh_out, fl_out, fr_out, ft_out, fz_out, nfailed


@njit(nogil=True, cache=True)
def max_speed_numba(h, hn, ht, p, safety, h_dry):
    rows, ncol = h.shape
    smax = 0.0
    for r in range(rows):
        tauL, uL, vL, piL, omL, dqL, aL, bL = _cell_state(h[r, 0], hn[r, 0], ht[r, 0], p, h_dry)
        wetL = h[r, 0] > h_dry
        for k in range(ncol - 1):
            tauR, uR, vR, piR, omR, dqR, aR, bR = _cell_state(h[r, k + 1], hn[r, k + 1], ht[r, k + 1], p, h_dry)
            wetR = h[r, k + 1] > h_dry
            if wetR and k + 1 < ncol - 1:
                s = abs(uR) + max(aR, bR) * tauR
                if s > smax:
                    smax = s
            if wetL or wetR:
                c = safety * max(max(aL, aR), max(bL, bR))
                s = max(abs(uL) + c * tauL, abs(uR) + c * tauR)
                if s > smax:
                    smax = s
            tauL, uL, vL, piL, omL, dqL, aL, bL = tauR, uR, vR, piR, omR, dqR, aR, bR
            wetL = wetR
    return smax


if HAVE_NUMBA:
    sweep_fluxes = sweep_fluxes_numba
    max_speed = max_speed_numba
else:
    sweep_fluxes = sweep_fluxes_numpy
    max_speed = max_speed_numpy

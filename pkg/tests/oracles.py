"""Independent reference implementations used only by the tests.

Nothing here imports the solver internals: each oracle is rebuilt from the
textbook formulas so that agreement is meaningful.
"""

from __future__ import annotations

import math

import numpy as np

G = 9.81


# ---------------------------------------------------------------------------
# Shields-type transport formulas, evaluated by hand
# ---------------------------------------------------------------------------

def hand_shields(formula: str, tau: float, tau_cr: float) -> float:
    excess = max(tau - tau_cr, 0.0)
    if formula == "mpm":
        return 8.0 * excess * math.sqrt(excess)
    if formula == "flvb":
        return 5.7 * excess * math.sqrt(excess)
    if formula == "nielsen":
        return 12.0 * math.sqrt(tau) * excess
    if formula == "ribberink":
        return 11.0 * math.exp(1.65 * math.log(excess)) if excess > 0 else 0.0
    if formula == "camenen":
        return 12.0 * tau * math.sqrt(tau) * math.exp(-4.5 * tau_cr / tau) if tau > 0 else 0.0
    raise ValueError(formula)


# ---------------------------------------------------------------------------
# Characteristic roots via the companion matrix
# ---------------------------------------------------------------------------

def companion_roots(h, u, alpha, beta, g=G):
    """Eigenvalues of the 3x3 flux Jacobian in (h, hu, z_b) variables."""
    A = np.array([
        [0.0, 1.0, 0.0],
        [g * h - u * u, 2.0 * u, g * h],
        [alpha, beta, 0.0],
    ])
    return np.sort(np.linalg.eigvals(A))


# ---------------------------------------------------------------------------
# Standalone Suliciu shallow-water relaxation solver (1D, free outflow)
# ---------------------------------------------------------------------------

def suliciu_flux(hL, huL, hR, huR, a, g=G):
    """Classical Suliciu relaxation flux at a batch of interfaces.

    ``a`` is the Lagrangian celerity; it is doubled wherever an intermediate
    specific volume would not be positive.
    """
    uL, uR = huL / hL, huR / hR
    pL, pR = 0.5 * g * hL ** 2, 0.5 * g * hR ** 2
    a = a.copy()
    for _ in range(9):
        ustar = 0.5 * (uL + uR) - 0.5 * (pR - pL) / a
        pstar = 0.5 * (pL + pR) - 0.5 * a * (uR - uL)
        wL = 1.0 / hL + (ustar - uL) / a
        wR = 1.0 / hR + (uR - ustar) / a
        ok = (wL > 0) & (wR > 0)
        if ok.all():
            break
        a = np.where(ok, a, 2.0 * a)
    sL = uL - a / hL
    sR = uR + a / hR
    h = np.where(sL >= 0, hL, np.where(ustar >= 0, 1.0 / np.where(wL > 0, wL, 1.0),
                 np.where(sR > 0, 1.0 / np.where(wR > 0, wR, 1.0), hR)))
    u = np.where(sL >= 0, uL, np.where(sR <= 0, uR, ustar))
    p = np.where(sL >= 0, pL, np.where(sR <= 0, pR, pstar))
    return h * u, h * u * u + p


def suliciu_run(h, hu, dx, t_end, cfl=0.5, safety=1.05, g=G):
    """Integrate the shallow-water system to ``t_end`` with outflow ghosts.

    The time step uses cell speeds ``|u| + max(sqrt(gh), |u|)`` and, at every
    interface, ``|u| + c/h`` on both sides with ``c`` the largest safety-scaled
    bound of the pair.
    """
    h = np.array(h, dtype=float)
    hu = np.array(hu, dtype=float)
    t = 0.0
    while t < t_end:
        H = np.concatenate([[h[0]], h, [h[-1]]])
        Q = np.concatenate([[hu[0]], hu, [hu[-1]]])
        U = Q / H
        ca = H * np.sqrt(g * H)
        cb = np.abs(Q)
        cell = (np.abs(U) + np.maximum(ca, cb) / H)[1:-1].max()
        c = safety * np.maximum(np.maximum(ca[:-1], ca[1:]), np.maximum(cb[:-1], cb[1:]))
        face = np.maximum(np.abs(U[:-1]) + c / H[:-1], np.abs(U[1:]) + c / H[1:]).max()
        dt = cfl * dx / max(cell, face)
        if t + dt >= t_end:
            dt, t = t_end - t, t_end
        else:
            t += dt
        a = safety * np.maximum(ca[:-1], ca[1:])
        fh, fq = suliciu_flux(H[:-1], Q[:-1], H[1:], Q[1:], a, g)
        h = h - dt / dx * (fh[1:] - fh[:-1])
        hu = hu - dt / dx * (fq[1:] - fq[:-1])
    return h, hu

"""Bedload closures, friction laws and their analytic derivatives.

All functions broadcast over numpy arrays. Shields-type laws are evaluated on
``|u|`` and carry the sign of ``u``, so every closure is odd in the velocity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from swexner.errors import ConfigurationError
from swexner.grid import G, H_DRY

SHIELDS_FORMULAS = ("mpm", "flvb", "nielsen", "ribberink", "camenen")
LAW_KINDS = ("grass",) + SHIELDS_FORMULAS
FRICTION_KINDS = ("darcy-weisbach", "manning")


@dataclass(frozen=True)
class FrictionLaw:
    kind: str = "manning"
    coef: float = 0.025

    def __post_init__(self):
        if self.kind not in FRICTION_KINDS:
            raise ConfigurationError(f"unknown friction law {self.kind!r}")
        if not (self.coef >= 0 and np.isfinite(self.coef)):
            raise ConfigurationError("friction coefficient must be finite and >= 0")


@dataclass(frozen=True)
class BedloadLaw:
    """Either a Grass law (``kind='grass'``) or one of the Shields-type formulas."""

    kind: str = "grass"
    A_g: float = 1.0
    m_g: float = 3.0
    tau_cr: float = 0.047
    d_s: float = 1e-3
    s: float = 2.65
    friction: FrictionLaw = FrictionLaw()

    def __post_init__(self):
        if self.kind not in LAW_KINDS:
            raise ConfigurationError(f"unknown bedload law {self.kind!r}; expected one of {LAW_KINDS}")
        if self.kind == "grass":
            if not self.A_g >= 0:
                raise ConfigurationError("A_g must be >= 0")
            if not 1 <= self.m_g <= 4:
                raise ConfigurationError("m_g must lie in [1, 4]")
        else:
            if not self.tau_cr >= 0:
                raise ConfigurationError("tau_cr must be >= 0")
            if not self.d_s > 0:
                raise ConfigurationError("d_s must be > 0")
            if not self.s > 1:
                raise ConfigurationError("relative density s must be > 1")

    @classmethod
    def grass(cls, A_g: float = 1.0, m_g: float = 3.0) -> "BedloadLaw":
        return cls("grass", A_g=A_g, m_g=m_g)

    @classmethod
    def shields(cls, formula: str, tau_cr: float = 0.047, d_s: float = 1e-3, s: float = 2.65,
                friction: FrictionLaw = FrictionLaw()) -> "BedloadLaw":
        return cls(formula, tau_cr=tau_cr, d_s=d_s, s=s, friction=friction)

    @property
    def is_grass(self) -> bool:
        return self.kind == "grass"

    @property
    def inert(self) -> bool:
        """True when the law can never move sediment."""
        return self.is_grass and self.A_g == 0.0

    def kernel_params(self, g: float = G) -> np.ndarray:
        """Flat float64 parameter vector consumed by the compiled kernels."""
        return np.array([
            float(LAW_KINDS.index(self.kind)), self.A_g, self.m_g, self.tau_cr, self.d_s, self.s,
            float(FRICTION_KINDS.index(self.friction.kind)), self.friction.coef, g,
        ])


def grass_flux(u, A_g, m_g):
    u = np.asarray(u, dtype=float)
    return A_g * u * np.abs(u) ** (m_g - 1.0)


def friction_slope(law: FrictionLaw, u, h, g: float = G, h_dry: float = H_DRY):
    u = np.asarray(u, dtype=float)
    h = np.asarray(h, dtype=float)
    wet = h > h_dry
    hs = np.where(wet, h, 1.0)
    if law.kind == "darcy-weisbach":
        sf = law.coef * u * np.abs(u) / (8.0 * g * hs)
    else:
        sf = law.coef ** 2 * u * np.abs(u) / hs ** (4.0 / 3.0)
    return np.where(wet, sf, 0.0)


def shields_flux(formula: str, tau_star, tau_cr):
    """Dimensionless transport rate q* as a function of the Shields stress."""
    tau = np.asarray(tau_star, dtype=float)
    excess = np.maximum(tau - tau_cr, 0.0)
    if formula == "mpm":
        return 8.0 * excess ** 1.5
    if formula == "flvb":
        return 5.7 * excess ** 1.5
    if formula == "nielsen":
        return 12.0 * np.sqrt(tau) * excess
    if formula == "ribberink":
        return 11.0 * excess ** 1.65
    if formula == "camenen":
        pos = tau > 0
        ts = np.where(pos, tau, 1.0)
        with np.errstate(over="ignore"):
            return np.where(pos, 12.0 * ts ** 1.5 * np.exp(-4.5 * tau_cr / ts), 0.0)
    raise ConfigurationError(f"unknown Shields formula {formula!r}")


def shields_flux_derivative(formula: str, tau_star, tau_cr):
    """d q*/d tau*, taking the upper one-sided value at the threshold."""
    tau = np.asarray(tau_star, dtype=float)
    above = tau >= tau_cr
    excess = np.maximum(tau - tau_cr, 0.0)
    if formula == "mpm":
        return 12.0 * excess ** 0.5
    if formula == "flvb":
        return 8.55 * excess ** 0.5
    if formula == "ribberink":
        return 18.15 * excess ** 0.65
    if formula == "nielsen":
        pos = tau > 0
        ts = np.where(pos, tau, 1.0)
        d = 12.0 * (excess / (2.0 * np.sqrt(ts)) + np.sqrt(ts))
        return np.where(pos & above, d, 0.0)
    if formula == "camenen":
        pos = tau > 0
        ts = np.where(pos, tau, 1.0)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            q = 12.0 * ts ** 1.5 * np.exp(-4.5 * tau_cr / ts)
            d = q * (1.5 / ts + 4.5 * tau_cr / ts ** 2)
        return np.where(pos & (q > 0), d, 0.0)
    raise ConfigurationError(f"unknown Shields formula {formula!r}")


def shields_stress(law: BedloadLaw, h, u, g: float = G, h_dry: float = H_DRY):
    """Dimensionless bed shear stress ``h |S_f| / ((s - 1) d_s)``."""
    sf = friction_slope(law.friction, np.abs(u), h, g, h_dry)
    return np.asarray(h, dtype=float) * sf / ((law.s - 1.0) * law.d_s)


def _flux_scale(law: BedloadLaw, g: float) -> float:
    return float(np.sqrt((law.s - 1.0) * g * law.d_s ** 3))


def dimensional_flux(law: BedloadLaw, h, u, g: float = G, h_dry: float = H_DRY):
    """Bedload discharge q_b (m^2/s) for depth ``h`` and velocity ``u``."""
    if law.is_grass:
        return grass_flux(u, law.A_g, law.m_g)
    tau = shields_stress(law, h, u, g, h_dry)
    return np.sign(u) * _flux_scale(law, g) * shields_flux(law.kind, tau, law.tau_cr)


def flux_du(law: BedloadLaw, h, u, g: float = G, h_dry: float = H_DRY):
    """Return ``(q_b, dq_b/du)`` at fixed depth."""
    u = np.asarray(u, dtype=float)
    q = dimensional_flux(law, h, u, g, h_dry)
    au = np.abs(u)
    if law.is_grass:
        return q, law.A_g * law.m_g * au ** (law.m_g - 1.0)
    tau = shields_stress(law, h, u, g, h_dry)
    moving = au > 0
    # tau is quadratic in |u| at fixed h
    dtau = np.where(moving, 2.0 * tau / np.where(moving, au, 1.0), 0.0)
    return q, _flux_scale(law, g) * shields_flux_derivative(law.kind, tau, law.tau_cr) * dtau


def flux_derivatives(law: BedloadLaw, h, hu, g: float = G, h_dry: float = H_DRY):
    """Partial derivatives of q_b in conservative variables.

    Returns ``(alpha, beta, dQs_du)`` with alpha = dq_b/dh at fixed hu,
    beta = dq_b/d(hu) at fixed h and dQs_du = dq_b/du at fixed h.
    """
    h = np.asarray(h, dtype=float)
    hu = np.asarray(hu, dtype=float)
    wet = h > h_dry
    hs = np.where(wet, h, 1.0)
    u = np.where(wet, hu / hs, 0.0)
    _, dq_du = flux_du(law, hs, u, g, h_dry)
    # dq_b/dh at fixed u: only the Manning stress depends on h (tau ~ h^(-1/3))
    if not law.is_grass and law.friction.kind == "manning":
        tau = shields_stress(law, hs, u, g, h_dry)
        dq_dh = (np.sign(u) * _flux_scale(law, g)
                 * shields_flux_derivative(law.kind, tau, law.tau_cr) * (-tau / (3.0 * hs)))
    else:
        dq_dh = np.zeros_like(u)
    beta = np.where(wet, dq_du / hs, 0.0)
    alpha = np.where(wet, dq_dh - u * beta, 0.0)
    dq_du = np.where(wet, dq_du, 0.0)
    if alpha.ndim == 0:
        return float(alpha), float(beta), float(dq_du)
    return alpha, beta, dq_du


def normal_flux(law: BedloadLaw, h, un, ut=0.0, g: float = G, h_dry: float = H_DRY):
    """Face-normal component of the bedload vector and its derivative in ``un``.

    The transport vector is aligned with the velocity and its magnitude is the
    1D law evaluated at ``|U|``; for Grass this is
    ``A_g (u, v) (u^2 + v^2)^((m_g - 1) / 2)``.
    """
    un = np.asarray(un, dtype=float)
    ut = np.asarray(ut, dtype=float)
    speed = np.sqrt(un * un + ut * ut)
    q, dq = flux_du(law, h, speed, g, h_dry)
    moving = speed > 0
    sp = np.where(moving, speed, 1.0)
    qn = np.where(moving, q * (un / sp), 0.0)
    cn, ct = un / sp, ut / sp
    dqn = np.where(moving, dq * cn * cn + (q / sp) * ct * ct, 0.0)
    return qn, dqn

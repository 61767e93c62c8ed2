"""Characteristic speeds of the coupled flow/bed system and bedform regime.

The quasi-linear matrix in (h, hu, z_b) has the characteristic polynomial

    lambda^3 - 2u lambda^2 + (u^2 - gh - gh beta) lambda - gh alpha = 0

whose three roots are the two surface-wave speeds and the bed-wave speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from swexner.bedload import BedloadLaw, flux_derivatives
from swexner.grid import G

U_EPS = 1e-10
DISC_EPS = 1e-12
TRANSCRITICAL_BAND = 0.05

DUNE = "Dune"
ANTIDUNE = "Antidune"
STILL = "Still"
NON_HYPERBOLIC = "NonHyperbolic"


@dataclass(frozen=True)
class RegimeReport:
    roots: tuple
    froude: float
    classification: str
    hyperbolic: bool = True
    sediment_root: float | None = None
    transcritical: bool = False
    pattern: str = ""


def cubic_coefficients(h, u, alpha, beta, g=G):
    """Coefficients (c2, c1, c0) of the monic cubic lambda^3 + c2 l^2 + c1 l + c0."""
    gh = g * h
    return -2.0 * u, u * u - gh - gh * beta, -gh * alpha


def _polish(c2, c1, c0, x, iters=3):
    for _ in range(iters):
        f = ((x + c2) * x + c1) * x + c0
        df = (3.0 * x + 2.0 * c2) * x + c1
        if df == 0.0:
            break
        step = f / df
        x_new = x - step
        if not math.isfinite(x_new):
            break
        x = x_new
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x


def solve_cubic(c2, c1, c0):
    """Roots of a monic real cubic via Cardano / trigonometric form.

    Returns ``(roots, hyperbolic)``; ``roots`` holds three sorted reals when
    hyperbolic, otherwise ``(real_root, complex_root, conj)``.
    """
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2 ** 3 / 27.0 - c2 * c1 / 3.0 + c0
    scale = max(abs(c2), math.sqrt(abs(c1)), abs(c0) ** (1.0 / 3.0), 1e-300)
    ps, qs = p / scale ** 2, q / scale ** 3
    disc = (qs / 2.0) ** 2 + (ps / 3.0) ** 3
    if disc > DISC_EPS:
        sq = math.sqrt(disc) * scale ** 3
        t = math.copysign(abs(-q / 2.0 + math.copysign(sq, -q)) ** (1.0 / 3.0), -q)
        y = t - p / (3.0 * t) if t != 0.0 else 0.0
        x = _polish(c2, c1, c0, y - shift)
        # deflate to the remaining quadratic x^2 + (c2 + x) x' + ...
        b = c2 + x
        c = c1 + b * x
        re = -b / 2.0
        im = math.sqrt(max(0.0, c - re * re))
        return (x, complex(re, im), complex(re, -im)), False
    if p >= 0.0:
        # triple root (p == q == 0 up to scaling)
        x = _polish(c2, c1, c0, -shift)
        return (x, x, x), True
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
    roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift for k in range(3)]
    roots = sorted(_polish(c2, c1, c0, r) for r in roots)
    return tuple(roots), True


def characteristic_roots(h, u, alpha, beta, g=G):
    """Three characteristic speeds of the coupled system (sorted when real)."""
    if not h > 0:
        raise ValueError("characteristic_roots needs h > 0")
    roots, _ = solve_cubic(*cubic_coefficients(h, u, alpha, beta, g))
    return roots


def _root_pattern(roots) -> str:
    return "".join("+" if r > 0 else "-" if r < 0 else "0" for r in roots)


def classify_point(h, u, alpha, beta, g=G, u_eps=U_EPS) -> RegimeReport:
    froude = abs(u) / math.sqrt(g * h)
    c = cubic_coefficients(h, u, alpha, beta, g)
    roots, hyperbolic = solve_cubic(*c)
    if abs(u) <= u_eps:
        return RegimeReport(roots, froude, STILL, hyperbolic)
    if not hyperbolic:
        return RegimeReport(roots, froude, NON_HYPERBOLIC, False)
    # mirror u < 0 onto u > 0: (u, alpha) -> (-u, -alpha) negates the roots
    sign = 1.0 if u > 0 else -1.0
    oriented = sorted(sign * r for r in roots)
    sed = min(oriented, key=abs)
    pattern = _root_pattern(oriented)
    transcritical = abs(froude - 1.0) < TRANSCRITICAL_BAND
    if transcritical:
        label = f"Transcritical({pattern})"
    elif sed > 0 and froude < 1.0:
        label = DUNE
    elif sed < 0 and froude > 1.0:
        label = ANTIDUNE
    else:
        label = f"Other({pattern})"
    return RegimeReport(roots, froude, label, True, sign * sed, transcritical, pattern)


def classify(h, hu, law: BedloadLaw, g=G) -> RegimeReport:
    """Regime report for a wet cell ``(h, hu)`` under a bedload law."""
    if not h > 0:
        raise ValueError("classify needs a wet cell")
    alpha, beta, _ = flux_derivatives(law, h, hu, g)
    return classify_point(h, hu / h, alpha, beta, g)

"""Hyperbolic integration contour for the propagator quadratures.

The integration path is the hyperbola

    z(xi) = a0 - aI*cosh(xi) + i*bI*sinh(xi),   xi in R,

chosen so that shifting xi into the complex strip |Im xi| <= d sweeps a family of
hyperbolas between one touching the operator's spectral sector (at nu = d) and one at
the critical angle phi_c (at nu = -d).  All quadrature step sizes are derived from the
strip half-height d, so this module fixes the convergence rate of everything downstream.

Given alpha in (0,2), spectral half-angle phi_s, shift a0 and critical angle phi_c:

    phi_alpha = min(pi, (pi - phi_s)/alpha)
    d         = (phi_c + phi_alpha - pi)/2
    aI        = a0*(cos d + tan(phi_alpha)*sin d)
    bI        = a0*(sin d - cos d*tan(phi_alpha))

Admissibility requires alpha*phi_s < pi/2, phi_alpha > pi/2, d > 0 and bI > 0.
"""

import math
from dataclasses import dataclass
from numbers import Real

import numpy as np

DEFAULT_A0 = math.pi / 6
DEFAULT_PHI_C = math.pi / 2


@dataclass(frozen=True)
class SpectralParams:
    """Spectral sector of the operator: shift rho_s > 0, half-angle phi_s in (0, pi/2)."""

    rho_s: float
    phi_s: float

    def __post_init__(self):
        if not self.rho_s > 0:
            raise ValueError("rho_s must be positive")
        if not 0 < self.phi_s < math.pi / 2:
            raise ValueError("phi_s must lie in (0, pi/2)")


@dataclass(frozen=True)
class ContourParams:
    """Resolved contour: hyperbola (a0, aI, bI), strip half-height d, angles."""

    a0: float
    a_i: float
    b_i: float
    d: float
    phi_alpha: float
    phi_c: float
    alpha: float
    phi_s: float


class ContourError(ValueError):
    """Raised when the requested (alpha, phi_s, phi_c) admit no valid contour."""


def contour_params(alpha: float, spectral, a0: float = DEFAULT_A0,
                   phi_c: float = DEFAULT_PHI_C) -> ContourParams:
    """Construct the integration hyperbola for fractional order alpha.

    spectral may be a SpectralParams or a bare phi_s value (rho_s then defaults to 1,
    which only matters for reporting).  Raises ContourError with a diagnostic when the
    parameters are inadmissible.
    """
    if isinstance(spectral, Real):
        spectral = SpectralParams(rho_s=1.0, phi_s=float(spectral))
    phi_s = spectral.phi_s
    if not 0 < alpha < 2:
        raise ContourError(f"alpha must lie in (0,2), got {alpha}")
    if not alpha * phi_s < math.pi / 2:
        raise ContourError(
            f"inadmissible: alpha*phi_s = {alpha * phi_s:.6f} >= pi/2; "
            "reduce the spectral angle or the fractional order")
    if not spectral.phi_s / alpha < phi_c <= math.pi / 2:
        raise ContourError(
            f"phi_c = {phi_c:.6f} outside (phi_s/alpha, pi/2] = "
            f"({phi_s / alpha:.6f}, {math.pi / 2:.6f}]")
    if not a0 > 0:
        raise ContourError("a0 must be positive")

    phi_alpha = min(math.pi, (math.pi - phi_s) / alpha)
    d = (phi_c + phi_alpha - math.pi) / 2.0
    if phi_alpha <= math.pi / 2:
        raise ContourError(
            f"inadmissible: phi_alpha = {phi_alpha:.6f} <= pi/2 (alpha too close to 2 "
            f"for phi_s = {phi_s:.6f})")
    if d <= 0:
        raise ContourError(f"inadmissible: strip half-height d = {d:.6f} <= 0")

    t = math.tan(phi_alpha)  # negative since phi_alpha in (pi/2, pi)
    a_i = a0 * (math.cos(d) + t * math.sin(d))
    b_i = a0 * (math.sin(d) - math.cos(d) * t)
    if b_i <= 0:
        raise ContourError(f"inadmissible: bI = {b_i:.6f} <= 0")
    # vertex a0 - aI >= 0 holds automatically (aI = a0*cos(d - phi_alpha)/cos(phi_alpha)
    # and |cos(d - phi_alpha)| <= |cos(phi_alpha)| is equivalent to d > 0 here)
    return ContourParams(a0=a0, a_i=a_i, b_i=b_i, d=d, phi_alpha=phi_alpha,
                         phi_c=phi_c, alpha=alpha, phi_s=phi_s)


def contour_point(p: ContourParams, xi):
    """z(xi) = a0 - aI*cosh(xi) + i*bI*sinh(xi); accepts scalars or arrays."""
    xi = np.asarray(xi, dtype=float)
    return p.a0 - p.a_i * np.cosh(xi) + 1j * p.b_i * np.sinh(xi)


def contour_derivative(p: ContourParams, xi):
    """z'(xi) = -aI*sinh(xi) + i*bI*cosh(xi)."""
    xi = np.asarray(xi, dtype=float)
    return -p.a_i * np.sinh(xi) + 1j * p.b_i * np.cosh(xi)


def shifted_hyperbola(p: ContourParams, nu: float):
    """Semi-axes (a(nu), b(nu)) of the hyperbola swept at strip level nu, |nu| <= d.

    a(nu) = aI*cos(nu) + bI*sin(nu),  b(nu) = bI*cos(nu) - aI*sin(nu).
    At nu=d the hyperbola touches the spectral sector; at nu=-d it reaches the
    critical angle phi_c.
    """
    if abs(nu) > p.d * (1 + 1e-12):
        raise ValueError(f"|nu| = {abs(nu):.6f} exceeds the strip half-height d = {p.d:.6f}")
    a_nu = p.a_i * math.cos(nu) + p.b_i * math.sin(nu)
    b_nu = p.b_i * math.cos(nu) - p.a_i * math.sin(nu)
    return a_nu, b_nu

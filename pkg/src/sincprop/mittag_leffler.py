"""Two-parameter Mittag-Leffler function on the real line.

E_{a,b}(z) = sum_k z^k / Gamma(a*k + b) is the scalar solution kernel of the
fractional Cauchy problem, so it doubles as the reference oracle for every
solver test here.  Two complementary evaluators:

  * ml_series: direct summation, reliable for moderate |z| where the terms
    decay before cancellation can bite (practical cutoff |z| <= 5);
  * ml_contour: the identity E_{a,1}(-x) = S_{a,1}(1) and E_{a,2}(-x) =
    S_{a,2}(1) for the scalar operator A = x turns the contour propagator at
    t = 1 into an evaluator for large negative arguments.

ml() dispatches between them at |z| = 2, far inside both domains of validity.
"""

import math

import numpy as np

from .contour import SpectralParams, contour_params
from .operators import DiagonalOperator
from .propagator import build_plan, evaluate

# Gamma is decreasing left of its positive minimum at x ~ 1.4616; the series
# cutoff must wait until a*k + b passes it so terms are guaranteed monotone.
_GAMMA_MIN_X = 1.4616321449683623


def gamma_real(x: float) -> float:
    """Gamma on the reals; raises ValueError at the poles 0, -1, -2, ..."""
    return math.gamma(x)


def ml_series(alpha: float, beta: float, z: float, tol: float = 1e-16) -> float:
    """Power series for E_{alpha,beta}(z), |z| <= 5.

    Stops once the current term is below tol relative to the partial sum and
    the Gamma argument has passed its minimum, so no later term can grow.
    """
    if not 0 < alpha <= 2:
        raise ValueError("alpha must lie in (0, 2]")
    if not beta > 0:
        raise ValueError("beta must be positive")
    if abs(z) > 5:
        raise ValueError(f"|z| = {abs(z):.3g} too large for the series; use ml()")
    total = 0.0
    zk = 1.0
    for k in range(10_000):
        term = zk / math.gamma(alpha * k + beta)
        total += term
        if abs(term) <= tol * max(abs(total), 1.0) and alpha * k + beta > _GAMMA_MIN_X:
            return total
        zk *= z
    raise ArithmeticError("series did not converge in 10000 terms")


def _auto_nodes(alpha: float, beta: int, d: float) -> int:
    # one-sided decay exponent of the contour summand: alpha for beta = 1, 1 for
    # beta = 2; budget targets exp(-sqrt(2*pi*d*decay*N)) <= e^-26 ~ 5e-12
    decay = alpha if beta == 1 else 1.0
    return max(512, math.ceil(676.0 / (2 * math.pi * d * decay)))


def ml_contour_array(alpha: float, beta: int, xs, N: int | None = None):
    """E_{alpha,beta}(-x) for an array of x > 0 via one diagonal contour solve."""
    if beta not in (1, 2):
        raise ValueError("beta must be 1 or 2")
    if beta == 2 and not alpha > 1:
        raise ValueError("beta = 2 requires alpha > 1")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if not np.all(xs > 0):
        raise ValueError("arguments must satisfy x > 0")
    phi_s = min(math.pi / 60, math.pi * (2 - alpha) / 8)
    op = DiagonalOperator(xs, phi_s=phi_s)
    params = contour_params(alpha, op.spectral)
    if N is None:
        N = _auto_nodes(alpha, beta, params.d)
    decay = alpha if beta == 1 else 1.0
    h = math.sqrt(2 * math.pi * params.d / (decay * N))
    plan = build_plan(op, alpha, beta, np.ones(xs.size), params, N, h,
                      half_contour=True)
    return evaluate(plan, 1.0)


def ml_contour(alpha: float, beta: int, z: float, N: int | None = None) -> float:
    """Contour evaluation of E_{alpha,beta}(z) for real z < 0."""
    if not z < 0:
        raise ValueError("contour evaluation needs z < 0")
    return float(ml_contour_array(alpha, beta, [-z], N=N)[0])


def ml(alpha: float, beta: float, z: float) -> float:
    """E_{alpha,beta}(z) for real z <= 2, dispatching series/contour at |z| = 2."""
    if abs(z) <= 2:
        return ml_series(alpha, beta, z)
    if z > 0:
        raise ValueError("arguments z > 2 are outside the supported domain")
    if beta not in (1, 2):
        raise ValueError("contour path supports beta in {1, 2} only")
    return ml_contour(alpha, int(beta), z)


def ml_array(alpha: float, beta: float, zs):
    """Vectorized ml() over a 1-d array of real arguments <= 2.

    Series arguments go one by one; all contour arguments share a single
    diagonal solve.
    """
    zs = np.asarray(zs, dtype=float)
    out = np.empty(zs.shape)
    small = np.abs(zs) <= 2
    for i in np.flatnonzero(small):
        out[i] = ml_series(alpha, beta, zs[i])
    big = ~small
    if big.any():
        if (zs[big] > 0).any():
            raise ValueError("arguments z > 2 are outside the supported domain")
        if beta not in (1, 2):
            raise ValueError("contour path supports beta in {1, 2} only")
        out[big] = ml_contour_array(alpha, int(beta), -zs[big])
    return out

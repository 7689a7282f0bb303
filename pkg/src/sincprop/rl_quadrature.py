"""Sinc quadrature for the Riemann-Liouville integral of order alpha > 0.

The integral (1/Gamma(alpha)) * int_0^t (t-s)^(alpha-1) v(s) ds is mapped to the
real line through s = t*psi(p) with the sigmoid psi(p) = e^p/(1+e^p), which turns
the integrand into a doubly exponentially decaying function of p.  The trapezoidal
sum with step h then converges at the sinc rate exp(-sqrt(2*pi*d*eps*N)).

Decay is asymmetric: e^{p} as p -> -infinity but e^{-alpha p} as p -> +infinity
for bounded v, so the default window [-ceil(eps*N), ceil(delta*N)] with
eps = min(1, alpha), delta = min(1, 1/alpha) keeps count x decay equal to eps*N
on both sides, matching the discretization error of the step.  A v ~ s^q with
an integrable singularity (q in (-1, 0)) slows the left tail to e^{(1+q)p};
rl_build takes that rate as left_decay and stretches only the left window.  Weights
w_k = e^{kh}/(1+e^{kh})^(alpha+1) are formed in log space so large windows never
overflow.
"""

import math
from dataclasses import dataclass

import numpy as np


def psi(p):
    """Sigmoid e^p/(1+e^p) evaluated without overflow for any real p."""
    p = np.asarray(p, dtype=float)
    q = np.atleast_1d(p)
    out = np.empty_like(q)
    pos = q >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-q[pos]))
    out[~pos] = np.exp(q[~pos]) / (1.0 + np.exp(q[~pos]))
    return out.reshape(p.shape) if p.ndim else float(out[0])


def psi_prime(p):
    """Derivative e^p/(1+e^p)^2, symmetric in p; computed as psi(p)*psi(-p)."""
    p = np.asarray(p, dtype=float)
    a = psi(-np.abs(p))
    return a * (1.0 - a)


def one_minus_psi(p):
    """1 - psi(p) = 1/(1+e^p), accurate also for large positive p."""
    return psi(-np.asarray(p, dtype=float))


@dataclass(frozen=True)
class RlQuadrature:
    """Frozen node/weight table for one (alpha, N) rule.

    nodes are the sigma_k = psi(k*h) in (0,1); log_weights hold
    log(e^{kh}/(1+e^{kh})^(alpha+1)), with weights = exp(log_weights) alongside.
    Applying the rule to v at time t means
    (t^alpha * h / Gamma(alpha)) * sum_k weights[k] * v(t*nodes[k]).
    """

    alpha: float
    N: int
    d: float
    eps: float
    delta: float
    h: float
    k: np.ndarray
    nodes: np.ndarray
    log_weights: np.ndarray
    weights: np.ndarray


def rl_build(alpha: float, N: int, d: float = math.pi / 4,
             eps_override: float | None = None,
             delta_override: float | None = None,
             left_decay: float = 1.0) -> RlQuadrature:
    """Build the rule for order alpha with base resolution N.

    eps_override / delta_override replace the default window exponents
    eps = min(1, alpha), delta = min(1, 1/alpha); the step stays
    h = sqrt(2*pi*d/(eps*N)) with the effective eps.

    left_decay is the decay rate a of the transformed integrand at the left
    tail, e^{a p} as p -> -infinity.  The defaults assume a bounded integrand
    (a = 1); for v ~ s^p with p in (-1, 0) the tail slows to a = 1 + p and the
    left window must stretch by 1/a to keep the truncation error at the sinc
    rate.  Only the left node count changes; the step and the right window
    stay put, so the rule still converges as exp(-sqrt(2*pi*d*eps*N)).  The
    stretch is capped where e^{kh} underflows, since nodes beyond that point
    cannot be represented (truncation there is below e^{-700*a}).
    """
    if not (alpha > 0):
        raise ValueError("alpha must be positive")
    if N < 1:
        raise ValueError("N must be >= 1")
    if not (d > 0):
        raise ValueError("d must be positive")
    eps = float(eps_override) if eps_override is not None else min(1.0, alpha)
    delta = float(delta_override) if delta_override is not None else min(1.0, 1.0 / alpha)
    if eps <= 0 or delta <= 0:
        raise ValueError("eps and delta must be positive")
    if not 0 < left_decay <= 1:
        raise ValueError("left_decay must lie in (0, 1]")
    h = math.sqrt(2 * math.pi * d / (eps * N))
    m_left = min(math.ceil(eps * N / left_decay), math.floor(700.0 / h))
    m_left = max(m_left, math.ceil(eps * N))
    k = np.arange(-m_left, math.ceil(delta * N) + 1)
    kh = k * h
    # log w_k = kh - (alpha+1)*log(1+e^{kh}), split by sign so the exp never overflows
    logw = np.empty_like(kh)
    pos = kh > 0
    logw[pos] = -alpha * kh[pos] - (alpha + 1) * np.log1p(np.exp(-kh[pos]))
    logw[~pos] = kh[~pos] - (alpha + 1) * np.log1p(np.exp(kh[~pos]))
    return RlQuadrature(alpha=float(alpha), N=int(N), d=float(d), eps=eps, delta=delta,
                        h=h, k=k, nodes=psi(kh), log_weights=logw, weights=np.exp(logw))


def rl_apply(rule: RlQuadrature, v, t: float):
    """Evaluate the fractional integral of v at time t >= 0.

    v maps a 1-d array of sample times in (0, t) to an array of values, scalar
    per time or vector per time (rows).  t = 0 returns exact zero (scalar).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    samples = np.asarray(v(t * rule.nodes))
    bad = ~np.isfinite(samples)
    if bad.any():
        idx = int(np.argwhere(bad)[0][0])
        raise ArithmeticError(
            f"integrand not finite at node {idx} (s = {t * rule.nodes[idx]:.6g})")
    w = rule.weights if samples.ndim == 1 else rule.weights[:, None]
    scale = t ** rule.alpha * rule.h / math.gamma(rule.alpha)
    return scale * np.sum(w * samples, axis=0)


def adaptive_terms(N0: int, t: float, t0: float, alpha: float,
                   d: float = math.pi / 4, eps: float | None = None) -> int:
    """Node budget at time t that matches the accuracy the full rule has at t0.

    The t^alpha prefactor shrinks the error for t < t0, so fewer nodes suffice:
    N(t) = (sqrt(N0) + alpha*ln(t/t0)/sqrt(2*pi*d*eps))^2, clamped to [1, N0].
    """
    if t <= 0 or t0 <= 0:
        raise ValueError("t and t0 must be positive")
    if eps is None:
        eps = min(1.0, alpha)
    if t >= t0:
        return int(N0)
    root = math.sqrt(N0) + alpha * math.log(t / t0) / math.sqrt(2 * math.pi * d * eps)
    if root <= 1.0:
        return 1
    return min(int(N0), max(1, math.ceil(root * root)))


def sinc_01(g, N: int, d: float = math.pi / 4):
    """Sinc rule for int_0^1 g(sigma) d(sigma) via the same sigmoid map.

    Symmetric window k in [-N, N], h = sqrt(2*pi*d/N); g receives the array of
    nodes psi(k*h) and returns values per node (scalar or rows).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    h = math.sqrt(2 * math.pi * d / N)
    kh = np.arange(-N, N + 1) * h
    vals = np.asarray(g(psi(kh)))
    w = psi_prime(kh) if vals.ndim == 1 else psi_prime(kh)[:, None]
    return h * np.sum(w * vals, axis=0)

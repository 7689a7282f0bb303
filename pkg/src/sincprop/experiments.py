"""Benchmark problems with known solutions, error metrics, and sweeps.

Three standard test problems for the fractional diffusion(-wave) equation on
(0,1) with Dirichlet boundaries, A = -a d2/dx2:

  * problem 1 (homogeneous): eigenfunction data, solution in closed form
    through the Mittag-Leffler function; solved exactly in a two-mode
    diagonal representation, so the measured error is pure time-quadrature.
  * problem 2 (inhomogeneous): f(t,x) = sin(pi x) + t sin(4 pi x); reference
    built from one-dimensional Duhamel integrals evaluated by independent
    sinc rules at a much higher resolution.
  * problem 3 (fully discretized): manufactured polynomial solution
    u = x^2 (x-1)(x - t^delta - b) on a finite-difference grid, exercising the
    complete solver including the singular f' for alpha > delta - 1.

fabm_oracle is a deliberately independent cross-check: a first-order
fractional Adams-Bashforth-Moulton stepper that shares no code with the
contour machinery.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._util import parallel_map
from .operators import DEFAULT_PHI_S, DiagonalOperator, FdLaplacian1D
from .mittag_leffler import ml_array
from .rl_quadrature import rl_apply, rl_build, sinc_01
from .solver import (HomogeneousConfig, InhomogeneousConfig, SeparableRhs,
                     SolveResult, solve, solve_homogeneous, solve_inhomogeneous)


@dataclass(frozen=True)
class ErrorReport:
    """Space-sup error per time plus its sup over the grid."""

    t_grid: np.ndarray
    pointwise_sup: np.ndarray
    sup_norm: float
    params: dict

    def __post_init__(self):
        expect = float(self.pointwise_sup.max()) if self.pointwise_sup.size else 0.0
        if self.sup_norm != expect:
            raise ValueError("sup_norm must equal max(pointwise_sup)")


def error_report(reference, computed, times=None, params=None) -> ErrorReport:
    """Pointwise and uniform errors between reference rows and a solve.

    computed may be a SolveResult (times and parameters are taken from it) or
    a plain (time x space) array with times given explicitly.
    """
    ref = np.asarray(reference)
    if isinstance(computed, SolveResult):
        comp = computed.states
        times = computed.times if times is None else np.asarray(times, dtype=float)
        params = computed.metadata if params is None else params
    else:
        comp = np.asarray(computed)
        if times is None:
            raise ValueError("times is required when computed is a plain array")
        times = np.asarray(times, dtype=float)
    if ref.shape != comp.shape:
        raise ValueError(f"grid mismatch: reference {ref.shape} vs computed {comp.shape}")
    if ref.shape[0] != times.size:
        raise ValueError("times length must match the row count")
    pointwise = np.abs(ref - comp).max(axis=1) if ref.size else np.zeros(times.size)
    sup = float(pointwise.max()) if pointwise.size else 0.0
    return ErrorReport(t_grid=times, pointwise_sup=pointwise, sup_norm=sup,
                       params=dict(params or {}))


def _mode_lambda(a: float, L: float, k: int) -> float:
    return a * math.pi ** 2 * k ** 2 / L ** 2


# ---------------------------------------------------------------- problem 1

def ex1_reference(alpha, a, L, k0, k1, t, x_grid):
    """Closed-form solution for eigenfunction data at one time.

    u0 = sin(pi k0 x / L) evolves as E_{alpha,1}(-lambda(k0) t^alpha); for
    alpha > 1 the velocity data u1 = sin(pi k1 x / L) adds
    t * E_{alpha,2}(-lambda(k1) t^alpha) times its eigenfunction.
    """
    x = np.asarray(x_grid, dtype=float)
    e0 = ml_array(alpha, 1, [-_mode_lambda(a, L, k0) * t ** alpha])[0]
    out = e0 * np.sin(math.pi * k0 * x / L)
    if alpha > 1:
        e1 = t * ml_array(alpha, 2, [-_mode_lambda(a, L, k1) * t ** alpha])[0]
        out = out + e1 * np.sin(math.pi * k1 * x / L)
    return out


def ex1_error(alpha, N, a=1.0, L=1.0, k0=1, k1=2, T=None, n_times=41,
              phi_s=DEFAULT_PHI_S, gamma=1.0, x_grid=None, workers=1) -> ErrorReport:
    """Solver-vs-closed-form error for problem 1 over a uniform grid."""
    if T is None:
        T = 5.0 if alpha > 1 else 1.0
    times = np.linspace(0.0, T, n_times)
    x = np.linspace(0.0, L, 101) if x_grid is None else np.asarray(x_grid, float)
    lam0 = _mode_lambda(a, L, k0)
    s0 = np.sin(math.pi * k0 * x / L)
    second = alpha > 1
    if second:
        lam1 = _mode_lambda(a, L, k1)
        op = DiagonalOperator([lam0, lam1], phi_s=phi_s)
        u0, u1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    else:
        op = DiagonalOperator([lam0], phi_s=phi_s)
        u0, u1 = np.array([1.0]), None
    cfg = HomogeneousConfig(alpha=alpha, N=N, gamma=gamma, phi_s=phi_s,
                            workers=workers)
    res = solve_homogeneous(op, u0, u1, cfg, times)
    computed = np.multiply.outer(res.states[:, 0], s0)
    reference = np.multiply.outer(
        ml_array(alpha, 1, -lam0 * times ** alpha), s0)
    if second:
        s1 = np.sin(math.pi * k1 * x / L)
        computed = computed + np.multiply.outer(res.states[:, 1], s1)
        reference = reference + np.multiply.outer(
            times * ml_array(alpha, 2, -lam1 * times ** alpha), s1)
    params = dict(res.metadata, problem="ex1", a=a, L=L, k0=k0, k1=k1, T=T)
    return error_report(reference, computed, times=times, params=params)


# ---------------------------------------------------------------- problem 2

def ex2_reference(alpha, coeffs=(1.0, 1.0), modes=(1, 4), a=1.0, L=1.0,
                  N_I=256, t=1.0, x_grid=None):
    """Duhamel reference for f(t,x) = sum_i c_i t^i sin(pi k_i x / L).

    Mode i = 0 is the fractional integral of E_{alpha,1}(-s^alpha lambda),
    evaluated with the integral rule at ceil(N_I/min(1,alpha)) nodes; modes
    i >= 1 reduce to integrals over (0,1) handled by the symmetric sigmoid
    rule with N_I nodes.  Entirely independent of the solver's contour path.
    """
    x = np.linspace(0.0, L, 101) if x_grid is None else np.asarray(x_grid, float)
    if t == 0:
        return np.zeros_like(x)
    d = math.pi / 4
    out = np.zeros_like(x)
    lam = [_mode_lambda(a, L, k) for k in modes]
    for i, (c, k) in enumerate(zip(coeffs, modes)):
        if c == 0:
            continue
        if i == 0:
            rule = rl_build(alpha, math.ceil(N_I / min(1.0, alpha)), d)
            val = c * rl_apply(rule, lambda s: ml_array(alpha, 1, -s ** alpha * lam[0]), t)
        else:
            cp = math.gamma(i + 1) / math.gamma(alpha + i) * c

            def g(sig, k_i=k, i_i=i, lam_i=lam[i]):
                e = ml_array(alpha, 1, -(t * (1.0 - sig)) ** alpha * lam_i)
                return e * sig ** (alpha + i_i - 1)

            val = cp * t ** (alpha + i) * sinc_01(g, N_I, d)
        out = out + float(val) * np.sin(math.pi * k * x / L)
    return out


def ex2_rhs(coeffs=(1.0, 1.0), modes=(1, 4)):
    """(f0 mode vector, f' SeparableRhs) for the polynomial-in-time source."""
    dim = len(modes)
    f0 = np.zeros(dim)
    f0[0] = coeffs[0]
    terms = []
    powers = []
    for i in range(1, len(coeffs)):
        if coeffs[i] == 0:
            continue
        vec = np.zeros(dim)
        vec[i] = 1.0
        mono = SeparableRhs.monomial(coeffs[i] * i, i - 1, vec)
        terms.append(mono.terms[0])
        powers.append(mono.powers[0])
    fprime = SeparableRhs(terms, powers=powers) if terms else None
    return f0, fprime


def ex2_error(alpha, N, N_I=256, coeffs=(1.0, 1.0), modes=(1, 4), a=1.0, L=1.0,
              T=1.0, n_times=21, phi_s=DEFAULT_PHI_S, chi=1.0, x_grid=None,
              workers=1) -> ErrorReport:
    """Solver-vs-reference error for problem 2 over a uniform grid."""
    times = np.linspace(0.0, T, n_times)
    x = np.linspace(0.0, L, 101) if x_grid is None else np.asarray(x_grid, float)
    lam = [_mode_lambda(a, L, k) for k in modes]
    op = DiagonalOperator(lam, phi_s=phi_s)
    f0, fprime = ex2_rhs(coeffs, modes)
    cfg = InhomogeneousConfig(alpha=alpha, chi=chi, N=N, phi_s=phi_s,
                              workers=workers)
    res = solve_inhomogeneous(op, f0, fprime, cfg, times)
    sines = np.stack([np.sin(math.pi * k * x / L) for k in modes])
    computed = res.states @ sines
    reference = np.stack([
        ex2_reference(alpha, coeffs, modes, a, L, N_I, t, x) for t in times])
    params = dict(res.metadata, problem="ex2", N_I=N_I, coeffs=list(coeffs),
                  modes=list(modes), a=a, L=L, T=T)
    return error_report(reference, computed, times=times, params=params)


# ---------------------------------------------------------------- problem 3

@dataclass(frozen=True)
class Ex3Problem:
    """Manufactured-solution problem on the interior finite-difference grid.

    u(t,x) = x^2 (x-1)(x - t^delta - b) vanishes at x = 0, 1 for every t and
    has u'(0,.) = 0 for delta > 1.  f and f' follow from the fractional time
    derivative of t^delta plus the exact second space derivative; f' carries
    the integrable singularity t^(delta-alpha-1) when alpha > delta - 1.
    """

    delta: float
    b: float
    alpha: float
    m: int
    op: FdLaplacian1D
    x: np.ndarray
    u0: np.ndarray
    u1: np.ndarray
    f0: np.ndarray
    fprime: SeparableRhs

    def u_at(self, t, x):
        x = np.asarray(x, dtype=float)
        return x ** 2 * (x - 1.0) * (x - t ** self.delta - self.b)

    def u(self, t):
        return self.u_at(t, self.x)

    def uprime(self, t):
        return -self.delta * t ** (self.delta - 1.0) * self.x ** 2 * (self.x - 1.0)


def ex3_build(delta: float, b: float, alpha: float, m: int,
              phi_s: float = DEFAULT_PHI_S) -> Ex3Problem:
    """Data for the manufactured problem on an m-point grid."""
    if not delta > 1:
        raise ValueError("delta must be > 1")
    if not delta > alpha:
        raise ValueError("f(0) is finite only for delta > alpha")
    op = FdLaplacian1D(m, a=1.0, L=1.0, phi_s=phi_s)
    x = op.x_interior
    q = x ** 2 * (x - 1.0)
    gd = math.gamma(delta + 1.0) / math.gamma(delta + 1.0 - alpha)
    u0 = q * (x - b)
    f0 = -12.0 * x ** 2 + 6.0 * x * (b + 1.0) - 2.0 * b
    fprime = (SeparableRhs.monomial(delta, delta - 1.0, 6.0 * x - 2.0)
              + SeparableRhs.monomial(-(delta - alpha) * gd, delta - alpha - 1.0, q))
    return Ex3Problem(delta=delta, b=b, alpha=alpha, m=m, op=op, x=x,
                      u0=u0, u1=np.zeros(op.dim), f0=f0, fprime=fprime)


def ex3_error(alpha, N, m, delta=2.0, b=-0.5, T=1.0, n_times=41,
              phi_s=DEFAULT_PHI_S, gamma=1.0, chi=1.0, workers=1) -> ErrorReport:
    """Full solver error against the manufactured solution."""
    prob = ex3_build(delta, b, alpha, m, phi_s=phi_s)
    times = np.linspace(0.0, T, n_times)
    res = solve(prob.op, alpha, u0=prob.u0, f0=prob.f0, fprime=prob.fprime,
                gamma=gamma, chi=chi, N=N, times=times, phi_s=phi_s,
                workers=workers)
    reference = np.stack([prob.u(t) for t in times])
    params = dict(res.metadata, problem="ex3", delta=delta, b=b, m=m, T=T)
    return error_report(reference, res, params=params)


# ------------------------------------------------------------------- oracle

def fabm_oracle(alpha, lam, f_scalar, u0, u1, n_steps, T):
    """Fractional Adams-Bashforth-Moulton stepper for d^alpha u + lam u = f.

    Product-integration predictor/corrector on a uniform grid; first-order
    accurate, brutally simple, and independent of every quadrature above.
    Returns (times, values).  u1 is used only for alpha > 1.
    """
    if n_steps < 16:
        raise ValueError("n_steps must be >= 16")
    n = int(n_steps)
    h = T / n
    t = np.arange(n + 1) * h
    u = np.empty(n + 1)
    g = np.empty(n + 1)
    u[0] = u0
    g[0] = f_scalar(0.0) - lam * u0
    u1 = 0.0 if u1 is None else u1

    def taylor(tt):
        return u0 + (u1 * tt if alpha > 1 else 0.0)

    ha = h ** alpha
    kk = np.arange(n + 2, dtype=float)
    kb = kk ** alpha
    kp = kk ** (alpha + 1.0)
    c = kp[2:] + kp[:-2] - 2.0 * kp[1:-1]
    ga1 = math.gamma(alpha + 1.0)
    ga2 = math.gamma(alpha + 2.0)
    for j in range(1, n + 1):
        bw = kb[1:j + 1] - kb[:j]
        pred = taylor(t[j]) + ha / ga1 * np.dot(bw[::-1], g[:j])
        gp = f_scalar(t[j]) - lam * pred
        a0j = (j - 1.0) ** (alpha + 1.0) - (j - 1.0 - alpha) * j ** alpha
        s = a0j * g[0] + (np.dot(c[:j - 1][::-1], g[1:j]) if j > 1 else 0.0)
        u[j] = taylor(t[j]) + ha / ga2 * (s + gp)
        g[j] = f_scalar(t[j]) - lam * u[j]
    return t, u


# -------------------------------------------------------------------- sweep

def convergence_sweep(cell, alphas, Ns, workers=1):
    """Run cell(alpha, N) -> sup error over the grid of cases.

    Returns one dict per case in deterministic (alpha, N) order; a cell that
    raises is recorded as NaN with the message in 'note' rather than aborting
    the sweep.
    """
    jobs = [(float(a), int(n)) for a in alphas for n in Ns]

    def one(job):
        a, n = job
        try:
            return float(cell(a, n)), ""
        except Exception as exc:
            return float("nan"), f"{type(exc).__name__}: {exc}"

    results = parallel_map(one, jobs, workers)
    return [{"alpha": a, "N": n, "sup_err": val, "note": note}
            for (a, n), (val, note) in zip(jobs, results)]

"""Exponentially convergent solver for the fractional Cauchy problem
d^alpha_t u + A u = f(t) with a sectorial operator A, 0 < alpha < 2.

The propagators are approximated by sinc quadrature on a hyperbolic
resolvent contour and the memory integrals by sigmoid-mapped sinc rules,
both converging like exp(-c sqrt(N)) in the number of resolvent solves,
uniformly in t down to t = 0.
"""

__version__ = "0.1.0"

from .contour import (ContourError, ContourParams, SpectralParams,
                      contour_derivative, contour_params, contour_point,
                      shifted_hyperbola)
from .operators import (DiagonalOperator, FdLaplacian1D, ResolventError,
                        ScalarOperator, SectorialOperator, apply,
                        resolvent_solve, resolvent_solve_block, tridiag_solve)
from .mittag_leffler import (gamma_real, ml, ml_array, ml_contour,
                             ml_contour_array, ml_series)
from .rl_quadrature import (RlQuadrature, adaptive_terms, one_minus_psi, psi,
                            psi_prime, rl_apply, rl_build, sinc_01)
from .propagator import (PropagatorPlan, build_plan, evaluate, evaluate_many,
                         node_table, s2_value_check, step_sizes)
from .solver import (HomogeneousConfig, InhomogeneousConfig, SeparableRhs,
                     SolveResult, g_kernel, homogeneous_params, inhom_params,
                     solve, solve_homogeneous, solve_inhomogeneous)
from .experiments import (ErrorReport, Ex3Problem, convergence_sweep,
                          error_report, ex1_error, ex1_reference, ex2_error,
                          ex2_reference, ex2_rhs, ex3_build, ex3_error,
                          fabm_oracle)

__all__ = [
    "ContourError", "ContourParams", "SpectralParams", "contour_derivative",
    "contour_params", "contour_point", "shifted_hyperbola",
    "DiagonalOperator", "FdLaplacian1D", "ResolventError", "ScalarOperator",
    "SectorialOperator", "apply", "resolvent_solve", "resolvent_solve_block",
    "tridiag_solve",
    "gamma_real", "ml", "ml_array", "ml_contour", "ml_contour_array",
    "ml_series",
    "RlQuadrature", "adaptive_terms", "one_minus_psi", "psi", "psi_prime",
    "rl_apply", "rl_build", "sinc_01",
    "PropagatorPlan", "build_plan", "evaluate", "evaluate_many", "node_table",
    "s2_value_check", "step_sizes",
    "HomogeneousConfig", "InhomogeneousConfig", "SeparableRhs", "SolveResult",
    "g_kernel", "homogeneous_params", "inhom_params", "solve",
    "solve_homogeneous", "solve_inhomogeneous",
    "ErrorReport", "Ex3Problem", "convergence_sweep", "error_report",
    "ex1_error", "ex1_reference", "ex2_error", "ex2_reference", "ex2_rhs",
    "ex3_build", "ex3_error", "fabm_oracle",
    "__version__",
]

"""Sums of translates, interval maxima and the difference map.

For kernels ``K_k`` on ``[-1, 1]`` and a field ``J`` on ``[0, 1]`` the
landscape ``F(y, t) = J(t) + sum_k K_k(t - y_k)`` is maximized on the
intervals between consecutive nodes.  This package computes those maxima,
the difference map ``Phi`` of consecutive maxima with its Jacobian, inverts
``Phi`` with a safeguarded Newton/continuation solver, and builds weighted
Chebyshev/Bojanov extremal polynomials and moving-node interpolants on top.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .applications import (BojanovResult, InterpolationProblem, InterpolationResult,
                           IntertwiningResult, bojanov_extremal, hermite_fejer_moving_nodes,
                           intertwining_probe, lagrange_interpolate, trig_interpolate)
from .calculus import (JacobianEstimate, analytic_jacobian, dini_bounds, dominance_check,
                       dominance_margin, fd_jacobian, jacobian, mu_bounds, one_sided_quotients,
                       sandwich_jacobian)
from .exceptions import (ConvergenceError, DomainError, InvalidKernelError, InvalidParameterError,
                         InvalidProblemError, NotApplicableError, NotRegularError, SumTransError)
from .fields import (Field, FieldCensus, FieldPiece, finiteness_count, make_discrete_field,
                     make_log_weight_field, make_piecewise_field, make_sampled_field,
                     make_zero_field, validate_field)
from .gallery import compare_example, get_example
from .kernels import (Kernel, KernelPiece, check_pm, make_example81_kernel, make_log_kernel,
                      make_piecewise_kernel, make_reciprocal_kernel, make_sine_kernel,
                      make_sqrt_kernel)
from .landscape import (Classification, MaximaReport, NodeSystem, classify, eval_F,
                        interval_maxima, interval_maxima_batch, phi)
from .solver import (Admissibility, SolveConfig, SolveReport, check_admissible, initial_point,
                     solve_equioscillation, solve_phi)
from .estimators import (BojanovExtremal, DifferenceMap, HermiteFejerInterpolator,
                         LagrangeInterpolator, TrigInterpolator)

__all__ = [
    "__version__",
    # kernels
    "Kernel", "KernelPiece", "check_pm", "make_example81_kernel", "make_log_kernel",
    "make_piecewise_kernel", "make_reciprocal_kernel", "make_sine_kernel", "make_sqrt_kernel",
    # fields
    "Field", "FieldCensus", "FieldPiece", "finiteness_count", "make_discrete_field",
    "make_log_weight_field", "make_piecewise_field", "make_sampled_field", "make_zero_field",
    "validate_field",
    # landscape
    "Classification", "MaximaReport", "NodeSystem", "classify", "eval_F", "interval_maxima",
    "interval_maxima_batch", "phi",
    # calculus
    "JacobianEstimate", "analytic_jacobian", "dini_bounds", "dominance_check",
    "dominance_margin", "fd_jacobian", "jacobian", "mu_bounds", "one_sided_quotients",
    "sandwich_jacobian",
    # solver
    "Admissibility", "SolveConfig", "SolveReport", "check_admissible", "initial_point",
    "solve_equioscillation", "solve_phi",
    # applications
    "BojanovResult", "InterpolationProblem", "InterpolationResult", "IntertwiningResult",
    "bojanov_extremal", "hermite_fejer_moving_nodes", "intertwining_probe",
    "lagrange_interpolate", "trig_interpolate",
    # examples
    "compare_example", "get_example",
    # estimators
    "BojanovExtremal", "DifferenceMap", "HermiteFejerInterpolator", "LagrangeInterpolator",
    "TrigInterpolator",
    # errors
    "ConvergenceError", "DomainError", "InvalidKernelError", "InvalidParameterError",
    "InvalidProblemError", "NotApplicableError", "NotRegularError", "SumTransError",
]

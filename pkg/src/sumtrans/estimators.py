"""Scikit-learn style wrappers around the difference map and its applications.

The estimators follow the usual conventions: constructor arguments are
stored verbatim (so ``get_params``/``set_params``/``clone`` work), ``fit``
validates and computes, learned attributes end with an underscore.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .applications import (InterpolationProblem, bojanov_extremal, hermite_fejer_moving_nodes,
                           lagrange_interpolate, trig_interpolate)
from .exceptions import ConvergenceError, InvalidParameterError
from .fields import make_zero_field
from .kernels import Kernel, make_log_kernel
from .landscape import eval_F, interval_maxima_batch
from .solver import SolveConfig, check_admissible, solve_phi
from .validation import (check_abscissae, check_node_matrix, check_points,
                         check_positive_vector, check_target_matrix)


def _resolve_kernels(kernels, n):
    if kernels is None or kernels == "log":
        return [make_log_kernel() for _ in range(n)]
    if isinstance(kernels, Kernel):
        return [kernels] * n
    kernels = list(kernels)
    if len(kernels) != n:
        raise InvalidParameterError(f"{len(kernels)} kernels given for {n} nodes")
    return kernels


def _config(solve_config):
    if solve_config is None:
        return SolveConfig()
    if isinstance(solve_config, SolveConfig):
        return solve_config
    return SolveConfig(**dict(solve_config))


class DifferenceMap(TransformerMixin, BaseEstimator):
    """The map ``y -> Phi(y)`` as a transformer; ``inverse_transform`` solves.

    Parameters
    ----------
    kernels : list of Kernel, Kernel or "log", default None
        Kernels per node; ``None`` means ``log|t|`` for every node.
    field : Field, default None
        External field; ``None`` means ``J = 0``.
    tol : float, default 1e-10
        Golden-section tolerance.
    solve_config : SolveConfig or dict, optional

    Examples
    --------
    >>> dm = DifferenceMap().fit([[0.25, 0.75]])
    >>> y = dm.inverse_transform([[0.0, 0.0]])
    >>> np.round(y, 7).tolist()
    [[0.1464466, 0.8535534]]
    """

    def __init__(self, kernels=None, field=None, tol=1e-10, solve_config=None):
        self.kernels = kernels
        self.field = field
        self.tol = tol
        self.solve_config = solve_config

    def fit(self, X, y=None):
        X = check_node_matrix(X)
        self.n_features_in_ = X.shape[1]
        self.kernels_ = _resolve_kernels(self.kernels, self.n_features_in_)
        self.field_ = self.field if self.field is not None else make_zero_field()
        self.admissibility_ = check_admissible(self.kernels_, self.field_)
        return self

    def transform(self, X):
        """``Phi`` of every row; non-regular rows give ``nan`` entries."""
        check_is_fitted(self, "kernels_")
        X = check_node_matrix(X, self.n_features_in_)
        reps = interval_maxima_batch(self.kernels_, self.field_, list(X), tol=self.tol,
                                     brackets=False)
        return np.array([np.where(r.regular, r.phi, np.nan) for r in reps])

    def interval_maxima(self, X):
        """``(m_0, ..., m_n)`` of every row."""
        check_is_fitted(self, "kernels_")
        X = check_node_matrix(X, self.n_features_in_)
        reps = interval_maxima_batch(self.kernels_, self.field_, list(X), tol=self.tol,
                                     brackets=False)
        return np.array([r.m for r in reps])

    def inverse_transform(self, D):
        """Solve ``Phi(y) = d`` for every row ``d``."""
        check_is_fitted(self, "kernels_")
        D = check_target_matrix(D, self.n_features_in_)
        cfg = _config(self.solve_config)
        out = np.empty_like(D)
        self.reports_ = []
        for i, d in enumerate(D):
            rep = solve_phi(self.kernels_, self.field_, d, cfg)
            if not rep.converged:
                raise ConvergenceError(f"row {i}: solver ended with status {rep.status}", rep)
            self.reports_.append(rep)
            out[i] = rep.y_solution.nodes
        return out


class _InterpolatorMixin:
    def _check_fitted(self):
        check_is_fitted(self, "result_")

    @property
    def nodes_(self):
        self._check_fitted()
        return self.result_.nodes

    @property
    def C_(self):
        self._check_fitted()
        return self.result_.C


class LagrangeInterpolator(_InterpolatorMixin, BaseEstimator):
    """Interpolate positive values by ``C prod_k L_k(t - y_k)`` with free nodes.

    Parameters
    ----------
    kernels : list of Kernel, Kernel or None
        Logarithms of the factors; ``None`` means ``L(t) = |t|`` repeated.
    power : float, default 1.0
        Used when ``kernels`` is ``None``: factors ``|t|**power``.
    solve_config : SolveConfig or dict, optional

    Examples
    --------
    >>> est = LagrangeInterpolator(power=2.0).fit([0.0, 1.0], [1.0, 4.0])
    >>> round(float(est.nodes_[0]), 10), round(est.C_, 8)
    (0.3333333333, 9.0)
    """

    def __init__(self, kernels=None, power=1.0, solve_config=None):
        self.kernels = kernels
        self.power = power
        self.solve_config = solve_config

    def fit(self, x, alpha):
        x = check_abscissae(x)
        alpha = check_positive_vector(alpha, x.size, "alpha")
        n = x.size - 1
        kernels = ([make_log_kernel(self.power) for _ in range(n)] if self.kernels is None
                   else _resolve_kernels(self.kernels, n))
        self.result_ = lagrange_interpolate(InterpolationProblem(kernels, x, alpha),
                                            _config(self.solve_config))
        if not self.result_.report.converged:
            raise ConvergenceError("interpolation solve did not converge", self.result_.report)
        return self

    def predict(self, t):
        """Values of the interpolant ``G`` at ``t``."""
        self._check_fitted()
        t = check_points(t)
        return self.result_.G(t)


class TrigInterpolator(_InterpolatorMixin, BaseEstimator):
    """Interpolation by ``C prod_k |sin(a_k pi (t - y_k))|^nu_k``.

    Examples
    --------
    >>> est = TrigInterpolator().fit([0.25, 0.75], [1.0, 1.0])
    >>> round(float(est.nodes_[0]), 10)
    0.5
    """

    def __init__(self, a=1.0, nu=1.0, solve_config=None):
        self.a = a
        self.nu = nu
        self.solve_config = solve_config

    def fit(self, x, alpha):
        x = check_abscissae(x)
        alpha = check_positive_vector(alpha, x.size, "alpha")
        self.result_ = trig_interpolate(x, alpha, self.a, self.nu, _config(self.solve_config))
        if not self.result_.report.converged:
            raise ConvergenceError("interpolation solve did not converge", self.result_.report)
        return self

    def predict(self, t):
        self._check_fitted()
        return self.result_.G(check_points(t))


class HermiteFejerInterpolator(_InterpolatorMixin, BaseEstimator):
    """Moving-node interpolation of prescribed local maxima of ``w G``.

    Parameters
    ----------
    kernels : list of Kernel, Kernel or None
        ``None`` means ``log|t|`` per node.
    weight : optional
        Weight description accepted by the log-weight field constructor.
    """

    def __init__(self, kernels=None, weight=None, solve_config=None):
        self.kernels = kernels
        self.weight = weight
        self.solve_config = solve_config

    def fit(self, alpha, y=None):
        alpha = check_positive_vector(alpha, name="alpha")
        n = alpha.size - 1
        if n < 1:
            raise InvalidParameterError("need at least two values")
        kernels = _resolve_kernels(self.kernels, n)
        self.result_ = hermite_fejer_moving_nodes(kernels, self.weight, alpha,
                                                  _config(self.solve_config))
        if not self.result_.report.converged:
            raise ConvergenceError("interpolation solve did not converge", self.result_.report)
        return self

    @property
    def z_(self):
        self._check_fitted()
        return self.result_.z

    def predict(self, t):
        """Values of ``w G`` at ``t``."""
        self._check_fitted()
        t = check_points(t)
        r = self.result_
        return r.C * np.exp(eval_F(r.kernels, r.field, r.nodes, t))


class BojanovExtremal(BaseEstimator):
    """Weighted Bojanov extremal polynomial.

    Examples
    --------
    >>> est = BojanovExtremal(nu=(1, 1)).fit()
    >>> np.round(est.nodes_, 7).tolist(), round(est.minimax_, 10)
    ([0.1464466, 0.8535534], 0.125)
    """

    def __init__(self, nu=(1, 1), weight=None, interval=(0.0, 1.0), solve_config=None):
        self.nu = nu
        self.weight = weight
        self.interval = interval
        self.solve_config = solve_config

    def fit(self, X=None, y=None):
        self.result_ = bojanov_extremal(self.nu, self.weight, self.interval,
                                        _config(self.solve_config))
        if not self.result_.report.converged:
            raise ConvergenceError("extremal solve did not converge", self.result_.report)
        self.nodes_ = self.result_.nodes
        self.minimax_ = self.result_.minimax
        self.t_points_ = self.result_.t_points
        return self

    def predict(self, x):
        """Values of ``T(x) = prod_k (x - x_k)^nu_k`` (absolute value for
        non-integer multiplicities)."""
        check_is_fitted(self, "result_")
        x = np.asarray(x, dtype=float)
        r = self.result_
        integer = np.all(r.nu == np.round(r.nu))
        out = np.ones(np.shape(x))
        for node, nu in zip(r.nodes, r.nu):
            out = out * ((x - node) ** int(nu) if integer else np.abs(x - node) ** nu)
        return out

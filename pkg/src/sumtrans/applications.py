"""Interpolation and extremal problems solved through ``Phi``.

All procedures reduce to one call of :func:`~sumtrans.solver.solve_phi`:

* **Lagrange-type interpolation** -- find nodes ``y`` and a scale ``C`` with
  ``G(x_j) = alpha_j`` for ``G(t) = C prod_k L_k(t - y_k)``.  The field is
  the discrete field on ``{x_j}`` and the target is
  ``log(alpha_j / alpha_{j-1})``.
* **Moving-node Hermite-Fejer interpolation** -- prescribe the values of
  ``w G`` at its (unknown) local maximum points.
* **Weighted Bojanov problem** -- minimize ``sup |w T|`` over generalized
  polynomials ``T(x) = prod (x - x_k)^nu_k``; the extremal nodes are the
  equioscillating ones.
* **Trigonometric interpolation** with factors ``|sin(a pi t)|^nu``.
* **Intertwining probe** -- two distinct node systems never have
  ordered maxima vectors.

Factors are given by their logarithms, i.e. by :class:`~sumtrans.kernels.Kernel`
objects: ``L_k(t) = exp(K_k(t))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .exceptions import InvalidParameterError, InvalidProblemError, NotRegularError
from .fields import Field, make_discrete_field, make_log_weight_field, validate_field
from .kernels import Kernel, make_log_kernel, make_sine_kernel
from .landscape import as_nodes, eval_F, interval_maxima, interval_maxima_batch
from .solver import SolveConfig, SolveReport, solve_equioscillation, solve_phi

STAT_TOL = 1e-5
STAT_H = 1e-6
BREAK_SKIP = 1e-9
CERT_TOL = 1e-6


@dataclass
class InterpolationProblem:
    """Data of a Lagrange-type interpolation problem.

    Attributes
    ----------
    kernels : list of Kernel
        Logarithms of the factors ``L_1..L_n``.
    x : ndarray
        Abscissae ``x_0 < ... < x_n`` in ``[0, 1]``.
    alpha : ndarray
        Positive values ``alpha_0..alpha_n``.
    mode : {"interval", "periodic"}
    nu : ndarray, optional
        Multiplicities, used only for the sign pattern.
    """

    kernels: list
    x: np.ndarray
    alpha: np.ndarray
    mode: str = "interval"
    nu: np.ndarray | None = None

    def __post_init__(self):
        self.kernels = list(self.kernels)
        self.x = np.asarray(self.x, dtype=float).ravel()
        self.alpha = np.asarray(self.alpha, dtype=float).ravel()
        n = len(self.kernels)
        if n < 1:
            raise InvalidParameterError("need at least one factor")
        if self.x.size != n + 1 or self.alpha.size != n + 1:
            raise InvalidParameterError(f"{n} factors need {n + 1} abscissae and values")
        if np.any(np.diff(self.x) <= 0) or self.x[0] < 0 or self.x[-1] > 1:
            raise InvalidParameterError("abscissae must increase strictly inside [0, 1]")
        if not np.all(np.isfinite(self.alpha)) or np.any(self.alpha <= 0):
            raise InvalidParameterError("values must be positive")
        if self.mode not in ("interval", "periodic"):
            raise InvalidParameterError(f"unknown mode {self.mode!r}")
        if self.nu is not None:
            self.nu = np.asarray(self.nu, dtype=float).ravel()
            if self.nu.size != n:
                raise InvalidParameterError("need one multiplicity per factor")


@dataclass
class InterpolationResult:
    """Nodes, scale and verification data of an interpolation solve.

    Attributes
    ----------
    nodes : ndarray
    C : float
    values : ndarray
        ``G`` (or ``w G``) at the interpolation points.
    residuals : ndarray
        ``|values - alpha|``.
    interp_tol : float
        ``1e-8 * max(alpha)``.
    interlaced : bool
        ``x_j < y_{j+1} < x_{j+1}`` for all ``j``.
    signed_values : ndarray or None
        ``(-1)^(sum_{k>j} nu_k) alpha_j`` for integer multiplicities.
    z : ndarray or None
        Maximum points (moving-node problems).
    stationarity : list or None
        Per ``z_j``: derivative estimate, or ``None`` where skipped.
    report : SolveReport
    """

    nodes: np.ndarray
    C: float
    x: np.ndarray
    alpha: np.ndarray
    values: np.ndarray
    residuals: np.ndarray
    interp_tol: float
    interlaced: bool
    report: SolveReport
    signed_values: np.ndarray | None = None
    z: np.ndarray | None = None
    stationarity: list | None = None
    stationary: bool | None = None
    kernels: list = dc_field(default_factory=list, repr=False)
    field: Field | None = dc_field(default=None, repr=False)

    @property
    def ok(self):
        return bool(self.report.converged and np.all(self.residuals <= self.interp_tol))

    def G(self, t):
        """Evaluate ``C * prod_k exp(K_k(t - y_k))`` (weight not included)."""
        t = np.asarray(t, dtype=float)
        total = np.zeros(np.shape(t))
        for k, kern in enumerate(self.kernels):
            total = total + kern.eval(t - self.nodes[k])
        return self.C * np.exp(total)

    def to_dict(self):
        out = {"nodes": self.nodes.tolist(), "C": self.C, "x": self.x.tolist(),
               "alpha": self.alpha.tolist(), "values": self.values.tolist(),
               "residuals": self.residuals.tolist(), "interp_tol": self.interp_tol,
               "interlaced": self.interlaced, "status": self.report.status,
               "iterations": self.report.iterations}
        if self.signed_values is not None:
            out["signed_values"] = self.signed_values.tolist()
        if self.z is not None:
            out["z"] = self.z.tolist()
            out["stationarity"] = self.stationarity
            out["stationary"] = self.stationary
        return out


def _kernel_nu(kernels, nu):
    if nu is not None:
        return np.asarray(nu, dtype=float)
    vals = [k.params.get("nu") for k in kernels]
    return None if any(v is None for v in vals) else np.array(vals, dtype=float)


def _sign_pattern(alpha, nu):
    if nu is None or not np.all(nu == np.round(nu)):
        return None
    tail = np.concatenate([np.cumsum(nu[::-1])[::-1], [0.0]])  # sum_{k >= j+1} nu_k
    return np.where(tail.astype(int) % 2 == 0, 1.0, -1.0) * alpha


def _log_targets(alpha):
    return np.log(alpha[1:]) - np.log(alpha[:-1])


def lagrange_interpolate(problem: InterpolationProblem,
                         config: SolveConfig | None = None, y0=None) -> InterpolationResult:
    """Nodes ``y`` and scale ``C`` with ``C prod_k L_k(x_j - y_k) = alpha_j``.

    Raises
    ------
    InvalidProblemError
        If the factors do not guarantee a unique solution for these
        abscissae (e.g. periodic factors with ``x_n - x_0 = 1``).

    Examples
    --------
    >>> res = lagrange_interpolate(InterpolationProblem(
    ...     [make_log_kernel(2.0)], [0.0, 1.0], [1.0, 4.0]))
    >>> round(float(res.nodes[0]), 10), round(res.C, 8)
    (0.3333333333, 9.0)
    """
    p = problem
    fld = make_discrete_field(p.x)
    rep = solve_phi(p.kernels, fld, _log_targets(p.alpha), config, y0)
    y = rep.y_solution.nodes
    logG0 = sum(float(k.eval(p.x[0] - y[i])) for i, k in enumerate(p.kernels))
    C = float(p.alpha[0] / math.exp(logG0))
    logG = np.array([sum(float(k.eval(xj - y[i])) for i, k in enumerate(p.kernels))
                     for xj in p.x])
    values = C * np.exp(logG)
    residuals = np.abs(values - p.alpha)
    interlaced = bool(np.all(p.x[:-1] < y) and np.all(y < p.x[1:]))
    return InterpolationResult(
        nodes=y.copy(), C=C, x=p.x, alpha=p.alpha, values=values, residuals=residuals,
        interp_tol=1e-8 * float(np.max(p.alpha)), interlaced=interlaced, report=rep,
        signed_values=_sign_pattern(p.alpha, _kernel_nu(p.kernels, p.nu)),
        kernels=p.kernels, field=fld)


def trig_interpolate(x, alpha, a=1.0, nu=1.0, config: SolveConfig | None = None,
                     y0=None) -> InterpolationResult:
    """Interpolation by ``S(t) = C prod_k |sin(a_k pi (t - y_k))|^nu_k``.

    Parameters
    ----------
    x, alpha : array_like
        ``n + 1`` abscissae in ``[0, 1]`` and positive values.
    a, nu : float or array_like
        Per-factor frequency ``0 < a_k <= 1`` and multiplicity.

    Raises
    ------
    InvalidProblemError
        If some ``a_k = 1`` while ``x_n - x_0 >= 1``.

    Examples
    --------
    >>> res = trig_interpolate([0.25, 0.75], [1.0, 1.0])
    >>> round(float(res.nodes[0]), 10), round(res.C ** 2, 10)
    (0.5, 2.0)
    """
    x = np.asarray(x, dtype=float).ravel()
    n = x.size - 1
    a = np.broadcast_to(np.asarray(a, dtype=float), (n,)).copy()
    nu = np.broadcast_to(np.asarray(nu, dtype=float), (n,)).copy()
    if n >= 1 and np.any(a == 1.0) and x[-1] - x[0] >= 1.0:
        raise InvalidProblemError("with a_k = 1 the abscissae must satisfy x_n - x_0 < 1")
    kernels = [make_sine_kernel(nu[k], a[k]) for k in range(n)]
    prob = InterpolationProblem(kernels, x, alpha, mode="periodic", nu=nu)
    return lagrange_interpolate(prob, config, y0)


def _weight_field(weight):
    if isinstance(weight, Field):
        return weight
    return make_log_weight_field(weight)


def hermite_fejer_moving_nodes(kernels: Sequence[Kernel], weight, alpha,
                               config: SolveConfig | None = None, y0=None) -> InterpolationResult:
    """Prescribe the local maxima of ``w G`` on the intervals between nodes.

    Finds ``y`` and ``C`` such that ``w G`` attains the value ``alpha_j`` as
    its maximum on ``[y_j, y_{j+1}]``, at a point ``z_j``.

    Parameters
    ----------
    kernels : sequence of Kernel
        Logarithms of the factors.
    weight : Field, None, float, callable or mapping
        The weight ``w``; anything accepted by
        :func:`~sumtrans.fields.make_log_weight_field`, or a ready field
        ``J = log w``.
    alpha : array_like
        ``n + 1`` positive values.

    Notes
    -----
    Stationarity ``(w G)'(z_j) = 0`` is checked by central differences
    (``h = 1e-6``, tolerance ``1e-5``) at interior maximum points away from
    declared non-smooth points of the weight.  The check is advisory when a
    maximum sits at a kernel kink.
    """
    kernels = list(kernels)
    n = len(kernels)
    alpha = np.asarray(alpha, dtype=float).ravel()
    if alpha.size != n + 1 or np.any(alpha <= 0) or not np.all(np.isfinite(alpha)):
        raise InvalidParameterError(f"need {n + 1} positive values")
    fld = _weight_field(weight)
    if not fld.usc:
        raise InvalidProblemError("the weight must be upper semicontinuous")
    rep = solve_phi(kernels, fld, _log_targets(alpha), config, y0)
    y = rep.y_solution.nodes
    mx = interval_maxima(kernels, fld, y)
    z = mx.argmax.copy()
    C = float(alpha[0] / math.exp(mx.m[0]))

    def wG(t):
        return C * np.exp(eval_F(kernels, fld, y, t))

    values = np.array([float(wG(zj)) for zj in z])
    residuals = np.abs(values - alpha)
    stat = []
    for zj in z:
        near_break = any(abs(zj - b) <= BREAK_SKIP for b in fld.breaks)
        if zj - STAT_H < 0 or zj + STAT_H > 1 or near_break:
            stat.append(None)
            continue
        stat.append(float((wG(zj + STAT_H) - wG(zj - STAT_H)) / (2 * STAT_H)))
    checked = [abs(s) for s in stat if s is not None]
    interlaced = bool(np.all(z[:-1] <= y) and np.all(y <= z[1:]))
    return InterpolationResult(
        nodes=y.copy(), C=C, x=z, alpha=alpha, values=values, residuals=residuals,
        interp_tol=1e-8 * float(np.max(alpha)), interlaced=interlaced, report=rep,
        signed_values=_sign_pattern(alpha, _kernel_nu(kernels, None)), z=z,
        stationarity=stat, stationary=bool(all(s <= STAT_TOL for s in checked)),
        kernels=kernels, field=fld)


@dataclass
class BojanovResult:
    """Extremal generalized polynomial of a weighted Bojanov problem.

    Attributes
    ----------
    nodes : ndarray
        Extremal nodes ``x_k*`` in ``[a, b]``.
    nodes_unit : ndarray
        The same nodes in ``[0, 1]``.
    nu : ndarray
    minimax : float
        ``sup |w T|`` on ``[a, b]``.
    t_points : ndarray
        Equioscillation points in ``[a, b]``.
    osc_values : ndarray
        ``w(t_k) |T(t_k)|``, all equal to ``minimax`` up to rounding.
    certificate : bool
        ``max_k |osc_values_k - minimax| <= 1e-6 * minimax``.
    coefficients : ndarray or None
        Monomial coefficients of ``T`` (highest degree first) for integer
        multiplicities and ``n <= 12``.
    """

    nodes: np.ndarray
    nodes_unit: np.ndarray
    nu: np.ndarray
    interval: tuple
    minimax: float
    m_bar: float
    t_points: np.ndarray
    osc_values: np.ndarray
    certificate: bool
    coefficients: np.ndarray | None
    report: SolveReport

    def to_dict(self):
        return {"nodes": self.nodes.tolist(), "nodes_unit": self.nodes_unit.tolist(),
                "nu": self.nu.tolist(), "interval": list(self.interval),
                "minimax": self.minimax, "m_bar": self.m_bar,
                "t_points": self.t_points.tolist(), "osc_values": self.osc_values.tolist(),
                "certificate": self.certificate,
                "coefficients": None if self.coefficients is None else self.coefficients.tolist(),
                "status": self.report.status, "iterations": self.report.iterations}


def bojanov_extremal(nu, weight=None, interval=(0.0, 1.0),
                     config: SolveConfig | None = None, y0=None) -> BojanovResult:
    """Weighted Bojanov extremal problem.

    Minimizes ``sup_{[a,b]} w |T|`` over ``T(x) = prod_k (x - x_k)^nu_k``
    with ordered nodes; the extremal nodes are characterized by
    equioscillation of the interval maxima.

    Parameters
    ----------
    nu : array_like
        Positive multiplicities.
    weight : optional
        Weight ``w`` expressed in the unit variable ``s = (x - a)/(b - a)``;
        any description accepted by
        :func:`~sumtrans.fields.make_log_weight_field`.  Default ``w = 1``.
    interval : (a, b)

    Examples
    --------
    >>> res = bojanov_extremal([1, 1, 1], interval=(-1.0, 1.0))
    >>> np.round(res.nodes, 10).tolist(), round(res.minimax, 12)
    ([-0.8660254038, 0.0, 0.8660254038], 0.25)
    """
    nu = np.asarray(nu, dtype=float).ravel()
    if nu.size < 1 or np.any(nu <= 0) or not np.all(np.isfinite(nu)):
        raise InvalidParameterError("multiplicities must be positive")
    a, b = (float(v) for v in interval)
    if not b > a:
        raise InvalidParameterError("interval must satisfy a < b")
    kernels = [make_log_kernel(v) for v in nu]
    fld = _weight_field(weight)
    if not fld.usc:
        raise InvalidProblemError("the weight must be upper semicontinuous")
    census = validate_field(fld, nu.size)
    if not census.passed:
        raise InvalidProblemError(f"the weight is nonzero at only {census.count} weighted "
                                  f"points; more than {nu.size} are needed")
    rep = solve_equioscillation(kernels, fld, config, y0)
    y = rep.y_solution.nodes
    scale = (b - a) ** float(np.sum(nu))
    t_unit = rep.t_points
    # certificate from direct evaluation, independent of the maxima search
    osc_unit = np.exp(eval_F(kernels, fld, y, t_unit))
    osc = scale * osc_unit
    minimax = scale * math.exp(rep.m_bar)
    cert = bool(np.max(np.abs(osc - minimax)) <= CERT_TOL * minimax)
    nodes = a + (b - a) * y
    coeffs = None
    if np.all(nu == np.round(nu)) and nu.size <= 12:
        roots = np.repeat(nodes, nu.astype(int))
        coeffs = np.poly(roots)
    return BojanovResult(nodes=nodes, nodes_unit=y.copy(), nu=nu, interval=(a, b),
                         minimax=minimax, m_bar=rep.m_bar, t_points=a + (b - a) * t_unit,
                         osc_values=osc, certificate=cert, coefficients=coeffs, report=rep)


@dataclass(frozen=True)
class IntertwiningResult:
    """Outcome of :func:`intertwining_probe`.

    ``status`` is ``witness`` (with ``i``, ``j``), ``indistinguishable`` or
    ``violation``.
    """

    status: str
    i: int | None
    j: int | None
    differences: tuple


def intertwining_probe(kernels: Sequence[Kernel], field: Field, x, y,
                       tol_strict: float = 1e-12, tol: float = 1e-12) -> IntertwiningResult:
    """Find indices with ``m_i(x) < m_i(y)`` and ``m_j(x) > m_j(y)``.

    For kernels that are positive multiples of one strictly concave,
    monotone, singular kernel, two distinct regular node systems can never
    have one maxima vector dominating the other, so a witness pair exists.

    Examples
    --------
    >>> from sumtrans.fields import make_zero_field
    >>> r = intertwining_probe([make_log_kernel()], make_zero_field(), [0.4], [0.6])
    >>> r.status, r.i, r.j
    ('witness', 0, 1)
    """
    rx, ry = interval_maxima_batch(kernels, field, [as_nodes(x), as_nodes(y)], tol=tol,
                                   brackets=False)
    for r in (rx, ry):
        if not r.regular:
            j = int(np.nonzero(~np.isfinite(r.m))[0][0])
            raise NotRegularError("both node systems must be regular", j)
    diff = rx.m - ry.m
    if np.all(np.abs(diff) <= tol_strict):
        return IntertwiningResult("indistinguishable", None, None, tuple(diff.tolist()))
    i, j = int(np.argmin(diff)), int(np.argmax(diff))
    if diff[i] < -tol_strict and diff[j] > tol_strict:
        return IntertwiningResult("witness", i, j, tuple(diff.tolist()))
    return IntertwiningResult("violation", None, None, tuple(diff.tolist()))

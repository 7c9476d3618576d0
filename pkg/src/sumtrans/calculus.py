"""Derivatives of the interval maxima and of the difference map.

Conventions
-----------
``matrix[j, i]`` is the partial derivative of ``Phi_j = m_{j+1} - m_j``
(``j = 0..n-1``) with respect to node ``y_i`` (kernel ``i``).  The matrix
``A = -Phi'`` is kept alongside it; for kernels satisfying the periodized
monotonicity condition with constant ``c`` its off-diagonal entries are
nonpositive and every column is diagonally ``c``-dominant:

    a_rr - sum_{j != r} |a_jr| >= c.

The partials of ``m_j`` are bracketed by one-sided kernel derivatives at the
extreme near-maximizers ``z_*j <= z_j*``:

    -D-K_i(z_*j - y_i) <= d+_i m_j <= -D-K_i(z_j* - y_i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import DomainError, NotApplicableError, NotRegularError
from .fields import Field
from .kernels import Kernel
from .landscape import MaximaReport, as_nodes, interval_maxima, interval_maxima_batch

TOL_DOM = 1e-6
KINK_TOL = 1e-3
DEFAULT_H = 1e-6
_LOCATE = 1e-9


@dataclass
class JacobianEstimate:
    """One matrix estimate of ``Phi'(y)`` with its diagnostics.

    Attributes
    ----------
    matrix : ndarray, shape (n, n)
        Estimate of ``Phi'(y)``; rows index components, columns nodes.
    A : ndarray, shape (n, n)
        ``-matrix``.
    mu_bounds : ndarray, shape (n+1, n, 2) or None
        Intervals housing ``mu_ji = K_i'(z_j - y_i)``.
    dominance_margin : float
        ``min_r (a_rr - sum_{j != r} |a_jr|)``.
    method : str
        ``analytic``, ``finite-difference`` or ``sandwich-midpoint``.
    kink : bool
        Finite differences at ``h`` and ``h/2`` disagreed by more than
        ``1e-3`` (only for the finite-difference method).
    h : float or None
        Step actually used by the finite-difference method.
    """

    matrix: np.ndarray
    A: np.ndarray
    mu_bounds: np.ndarray | None
    dominance_margin: float
    method: str
    kink: bool = False
    h: float | None = None

    def to_dict(self):
        def enc(a):
            return None if a is None else np.where(np.isfinite(a), a, np.nan).tolist()

        return {"matrix": enc(self.matrix), "A": enc(self.A),
                "mu_bounds": enc(self.mu_bounds),
                "dominance_margin": float(self.dominance_margin), "method": self.method,
                "kink": bool(self.kink), "h": self.h}


def dominance_margin(A) -> float:
    """Column-wise diagonal dominance margin of ``A``.

    Examples
    --------
    >>> dominance_margin([[2.0, -1.5], [-1.5, 2.0]])
    0.5
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    diag = np.diag(A)
    off = np.sum(np.abs(A), axis=0) - np.abs(diag)
    return float(np.min(diag - off))


def dominance_check(est, c: float) -> bool:
    """True iff the dominance margin is at least ``c - 1e-6``.

    ``est`` is a :class:`JacobianEstimate` or the matrix ``A`` itself.

    Examples
    --------
    >>> dominance_check([[4.0]], 4.0)
    True
    >>> dominance_check([[2.0, -2.5], [-2.5, 2.0]], 0.0)
    False
    """
    margin = est.dominance_margin if isinstance(est, JacobianEstimate) else dominance_margin(est)
    return bool(margin >= c - TOL_DOM)


def _estimate(matrix, method, mu_bounds=None, kink=False, h=None):
    matrix = np.asarray(matrix, dtype=float)
    A = -matrix
    return JacobianEstimate(matrix=matrix, A=A, mu_bounds=mu_bounds,
                            dominance_margin=dominance_margin(A), method=method,
                            kink=kink, h=h)


def _m_to_phi_matrix(dm):
    """Rows ``d m_j`` (shape ``(n+1, n)``) -> rows ``d Phi_j``."""
    return dm[1:] - dm[:-1]


# --------------------------------------------------------------------------
# sandwich bounds
# --------------------------------------------------------------------------

def _safe_dminus(kern, t):
    try:
        return kern.d_minus(t)
    except DomainError:
        return math.nan


def mu_bounds(kernels: Sequence[Kernel], report: MaximaReport) -> np.ndarray:
    """Intervals ``[D-K_i(z_j* - y_i), D-K_i(z_*j - y_i)]`` for all ``j, i``.

    Uses the near-maximizer brackets when present, otherwise the argmax set.
    Entries are ``nan`` when an offset falls on a kernel singularity.
    """
    hull = report.brackets if report.brackets is not None else report.argmax_set
    y = report.nodes
    n = y.size
    out = np.full((n + 1, n, 2), np.nan)
    for j in range(n + 1):
        zl, zr = hull[j]
        if not (np.isfinite(zl) and np.isfinite(zr)):
            continue
        for i, kern in enumerate(kernels):
            out[j, i, 0] = _safe_dminus(kern, zr - y[i])
            out[j, i, 1] = _safe_dminus(kern, zl - y[i])
    return out


def dini_bounds(kernels: Sequence[Kernel], report: MaximaReport):
    """Bounds on the right partial Dini derivatives of ``m_j`` in ``y_i``.

    Returns
    -------
    lower, upper : ndarray, shape (n+1, n)
        ``-D-K_i(z_*j - y_i)`` and ``-D-K_i(z_j* - y_i)``.
    """
    mb = mu_bounds(kernels, report)
    return -mb[..., 1], -mb[..., 0]


def one_sided_quotients(kernels, field, y, h=DEFAULT_H, tol=1e-12):
    """Forward quotients ``(m_j(y + h e_i) - m_j(y)) / h``, shape ``(n+1, n)``."""
    y = as_nodes(y).nodes
    n = y.size
    pts = [y] + [y + h * np.eye(n)[i] for i in range(n)]
    reps = interval_maxima_batch(kernels, field, pts, tol=tol, brackets=False)
    base = reps[0].m
    return np.array([(reps[i + 1].m - base) / h for i in range(n)]).T


def sandwich_jacobian(kernels, field, y, report=None) -> JacobianEstimate:
    """Jacobian from the midpoints of the ``mu`` intervals."""
    rep = report if report is not None else interval_maxima(kernels, field, y)
    mb = mu_bounds(kernels, rep)
    if not np.all(np.isfinite(mb)):
        raise NotApplicableError("a bracket touches a kernel singularity")
    dm = -0.5 * (mb[..., 0] + mb[..., 1])
    return _estimate(_m_to_phi_matrix(dm), "sandwich-midpoint", mu_bounds=mb)


# --------------------------------------------------------------------------
# analytic partials
# --------------------------------------------------------------------------

def _kink_of(kern, offset):
    for b in kern.breakpoints:
        if abs(offset - b) <= _LOCATE:
            return b
    return None


def _rest_slope(kernels, field, y, z, skip, side):
    """One-sided slope at ``z`` of ``J + sum_{k != skip} K_k(. - y_k)``."""
    s = field.slope(z, side)
    if not np.isfinite(s):
        return math.nan
    for k, kern in enumerate(kernels):
        if k == skip:
            continue
        off = z - y[k]
        try:
            s += kern.d_minus(off) if side < 0 else kern.d_plus(off)
        except DomainError:
            return math.nan
    return s


def _partials_of_m(kernels, field, y, j, z):
    """Gradient of ``m_j`` at ``y`` given the unique maximizer ``z``."""
    n = y.size
    ext = np.concatenate(([0.0], y, [1.0]))
    for k in range(n):
        if abs(z - y[k]) <= _LOCATE and (k + 1 in (j, j + 1)) and not kernels[k].singular:
            raise NotApplicableError(f"maximizer of interval {j} sits on a moving node")
    kinks = [(i, _kink_of(kernels[i], z - y[i])) for i in range(n)]
    kinks = [(i, b) for i, b in kinks if b is not None]
    grad = np.empty(n)
    if len(kinks) > 1:
        raise NotApplicableError("maximizer at a kink of several kernels")
    locked = None
    if kinks:
        i, b = kinks[0]
        # the maximizer follows node i iff the kink is a strict local peak
        left = _rest_slope(kernels, field, y, z, i, -1) + kernels[i].d_minus(b)
        right = _rest_slope(kernels, field, y, z, i, +1) + kernels[i].d_plus(b)
        if not (left > 0 > right):
            raise NotApplicableError("kernel kink at the maximizer is not a strict peak")
        rl = _rest_slope(kernels, field, y, z, i, -1)
        rr = _rest_slope(kernels, field, y, z, i, +1)
        if not (np.isfinite(rl) and abs(rl - rr) <= 1e-8 * max(1.0, abs(rl))):
            raise NotApplicableError("field or other kernels not differentiable at the kink")
        if not (ext[j] < z < ext[j + 1]):
            raise NotApplicableError("locked maximizer on an interval end")
        locked = (i, rl)
    for k in range(n):
        if locked is not None and k == locked[0]:
            grad[k] = locked[1]
            continue
        off = z - y[k]
        try:
            dl, dr = kernels[k].d_minus(off), kernels[k].d_plus(off)
        except DomainError:
            raise NotApplicableError("maximizer at a kernel singularity") from None
        if abs(dl - dr) > 1e-8 * max(1.0, abs(dl)):
            raise NotApplicableError("kernel not differentiable at the maximizer offset")
        grad[k] = -dl
    return grad


def analytic_jacobian(kernels: Sequence[Kernel], field: Field, y,
                      report: MaximaReport | None = None) -> JacobianEstimate:
    """Exact Jacobian of ``Phi`` from unique maximizers.

    With a unique maximizer ``z_j`` where every kernel is differentiable,
    ``d m_j / d y_i = -K_i'(z_j - y_i)``.  If ``z_j`` is pinned to a kink of
    kernel ``i`` (a strict local peak of ``F``), the maximizer moves with
    ``y_i`` and ``d m_j / d y_i`` is the slope of the remaining terms.

    Raises
    ------
    NotRegularError
        If ``y`` is not regular.
    NotApplicableError
        Maximizer not unique, or the formula does not apply; fall back to
        :func:`fd_jacobian`.

    Examples
    --------
    >>> from sumtrans.kernels import make_log_kernel
    >>> from sumtrans.fields import make_zero_field
    >>> est = analytic_jacobian([make_log_kernel()], make_zero_field(), [0.5])
    >>> est.matrix.tolist(), est.dominance_margin
    ([[-4.0]], 4.0)
    """
    y = as_nodes(y).nodes
    rep = report if report is not None else interval_maxima(kernels, field, y)
    if not rep.regular:
        j = int(np.nonzero(~np.isfinite(rep.m))[0][0])
        raise NotRegularError(f"interval I_{j} is singular", j)
    if not np.all(rep.unique):
        raise NotApplicableError("maximizer not unique")
    dm = np.array([_partials_of_m(kernels, field, y, j, rep.argmax[j])
                   for j in range(y.size + 1)])
    mb = mu_bounds(kernels, rep) if rep.brackets is not None else None
    return _estimate(_m_to_phi_matrix(dm), "analytic", mu_bounds=mb)


# --------------------------------------------------------------------------
# finite differences
# --------------------------------------------------------------------------

def _central(kernels, field, y, h, tol):
    n = y.size
    E = np.eye(n)
    pts = [y + h * E[i] for i in range(n)] + [y - h * E[i] for i in range(n)]
    pts += [y + 0.5 * h * E[i] for i in range(n)] + [y - 0.5 * h * E[i] for i in range(n)]
    if np.any(np.array(pts) <= 0.0) or np.any(np.array(pts) >= 1.0):
        return None
    if any(np.any(np.diff(p) <= 0) for p in pts):
        return None
    reps = interval_maxima_batch(kernels, field, pts, tol=tol, brackets=False)
    if not all(r.regular for r in reps):
        return None
    P = np.array([r.phi for r in reps])
    d_h = ((P[:n] - P[n:2 * n]) / (2 * h)).T
    d_h2 = ((P[2 * n:3 * n] - P[3 * n:]) / h).T
    return d_h, d_h2


def fd_jacobian(kernels: Sequence[Kernel], field: Field, y, h: float = DEFAULT_H,
                tol: float = 1e-12, retries: int = 3) -> JacobianEstimate:
    """Central-difference Jacobian of ``Phi`` with one Richardson halving.

    Differences at ``h`` and ``h/2`` are combined by Richardson
    extrapolation.  If they disagree by more than ``1e-3`` the point is
    flagged as a kink and the ``h/2`` estimate is returned instead.  When a
    perturbed point leaves the regularity set, ``h`` is divided by 10 and
    the evaluation retried (at most ``retries`` times).

    Raises
    ------
    NotRegularError
        If the perturbations keep leaving the regularity set.

    Examples
    --------
    >>> from sumtrans.kernels import make_log_kernel
    >>> from sumtrans.fields import make_zero_field
    >>> est = fd_jacobian([make_log_kernel()], make_zero_field(), [0.5])
    >>> bool(abs(est.matrix[0, 0] + 4.0) < 1e-6)
    True
    """
    y = as_nodes(y).nodes
    step = float(h)
    for _ in range(retries + 1):
        res = _central(kernels, field, y, step, tol)
        if res is not None:
            d_h, d_h2 = res
            kink = bool(np.max(np.abs(d_h - d_h2)) > KINK_TOL)
            mat = d_h2 if kink else (4.0 * d_h2 - d_h) / 3.0
            return _estimate(mat, "finite-difference", kink=kink, h=step)
        step *= 0.1
    raise NotRegularError("finite-difference stencil leaves the regularity set")


def jacobian(kernels, field, y, mode="auto", report=None, h=DEFAULT_H) -> JacobianEstimate:
    """Dispatch to the analytic, finite-difference or sandwich estimate.

    ``mode="auto"`` uses the analytic formula when it applies and falls back
    to finite differences otherwise.
    """
    if mode == "analytic":
        return analytic_jacobian(kernels, field, y, report)
    if mode == "fd":
        return fd_jacobian(kernels, field, y, h=h)
    if mode == "sandwich":
        return sandwich_jacobian(kernels, field, y, report)
    if mode != "auto":
        raise ValueError(f"unknown jacobian mode {mode!r}")
    try:
        return analytic_jacobian(kernels, field, y, report)
    except NotApplicableError:
        return fd_jacobian(kernels, field, y, h=h)

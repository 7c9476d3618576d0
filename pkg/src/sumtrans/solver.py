"""Inversion of the difference map ``Phi`` on the regularity set.

For admissible problems ``Phi`` is a homeomorphism from the regularity set
``Y`` onto ``R^n``, so ``Phi(y) = d`` has exactly one solution for every
target ``d``.  Admissible means every kernel is singular and either

* every kernel satisfies the periodized monotonicity condition with a
  positive constant, or
* every kernel is strictly concave with constant ``0`` and the field is
  singular (or cusp-like) at an endpoint.

The solver is a damped Newton method: Armijo backtracking on the sup-norm
residual, steps truncated so the iterate stays ordered and regular, and a
continuation fallback along ``(1 - s) Phi(y_start) + s d`` when the line
search keeps failing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Sequence

import numpy as np

from .calculus import JacobianEstimate, analytic_jacobian, fd_jacobian
from .exceptions import (InvalidParameterError, InvalidProblemError, NotApplicableError,
                         NotRegularError)
from .fields import Field, finiteness_count, validate_field
from .kernels import Kernel
from .landscape import MaximaReport, NodeSystem, as_nodes, classify, interval_maxima

logger = logging.getLogger(__name__)

ARMIJO_C1 = 1e-4
TRUNCATE = 0.9
LOW_MARGIN = 1e-8


@dataclass(frozen=True)
class SolveConfig:
    """Solver settings.

    Parameters
    ----------
    residual_tol : float, default 1e-10
        Sup-norm tolerance on ``Phi(y) - d``.
    max_iters : int, default 200
        Total Newton iterations, continuation legs included.
    damping : float, default 0.5
        Backtracking factor of the Armijo line search.
    max_halvings : int, default 40
    boundary_margin : float, default 1e-14
        Minimal distance of the iterate to ``0``, ``1`` and to ties.
    jacobian_mode : {"auto", "analytic", "fd"}
    fd_h : float, default 1e-6
    continuation_trigger : int, default 5
        Consecutive line-search failures before continuation starts.
    min_leg : float, default 1e-6
        Continuation gives up below this step in ``s``.
    tol : float, default 1e-10
        Golden-section tolerance used for the interval maxima.
    seed : int, default 0
        Seed for randomized initial-point nudges.
    """

    residual_tol: float = 1e-10
    max_iters: int = 200
    damping: float = 0.5
    max_halvings: int = 40
    boundary_margin: float = 1e-14
    jacobian_mode: str = "auto"
    fd_h: float = 1e-6
    continuation_trigger: int = 5
    min_leg: float = 1e-6
    tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if not self.residual_tol >= 1e-14:
            raise InvalidParameterError("residual_tol must be at least 1e-14")
        for name in ("max_iters", "max_halvings", "continuation_trigger"):
            if getattr(self, name) < 1:
                raise InvalidParameterError(f"{name} must be positive")
        if not 0 < self.damping < 1:
            raise InvalidParameterError("damping must lie in (0, 1)")
        if self.jacobian_mode not in ("auto", "analytic", "fd"):
            raise InvalidParameterError(f"unknown jacobian_mode {self.jacobian_mode!r}")
        for name in ("boundary_margin", "fd_h", "min_leg", "tol"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive")


@dataclass
class SolveReport:
    """Outcome of :func:`solve_phi`.

    Attributes
    ----------
    y_solution : NodeSystem
    residual_history : list of float
        Sup-norm residuals against the final target; strictly decreasing.
    iterations : int
    jacobian_diagnostics : JacobianEstimate or None
        Last Jacobian used.
    status : str
        ``converged``, ``max-iters`` or ``left-domain``.
    target : ndarray
    phi : ndarray
        ``Phi(y_solution)``.
    maxima : MaximaReport
    continuation_legs : int
    m_bar : float or None
        Common maximum (equioscillation solves only).
    t_points : ndarray or None
        Maximizers ``z_0..z_n`` (equioscillation solves only).
    """

    y_solution: NodeSystem
    residual_history: list
    iterations: int
    jacobian_diagnostics: JacobianEstimate | None
    status: str
    target: np.ndarray
    phi: np.ndarray
    maxima: MaximaReport
    continuation_legs: int = 0
    m_bar: float | None = None
    t_points: np.ndarray | None = None
    message: str = ""

    @property
    def converged(self):
        return self.status == "converged"

    @property
    def residual(self):
        return float(self.residual_history[-1]) if self.residual_history else math.inf

    def to_dict(self):
        out = {
            "status": self.status, "y": self.y_solution.nodes.tolist(),
            "residual": self.residual, "residual_history": [float(r) for r in self.residual_history],
            "iterations": self.iterations, "continuation_legs": self.continuation_legs,
            "target": self.target.tolist(), "phi": self.phi.tolist(),
            "maxima": self.maxima.to_dict(),
            "jacobian": None if self.jacobian_diagnostics is None
            else self.jacobian_diagnostics.to_dict(),
            "message": self.message,
        }
        if self.m_bar is not None:
            out["m_bar"] = float(self.m_bar)
            out["t_points"] = self.t_points.tolist()
        return out


# --------------------------------------------------------------------------
# admissibility
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    reason: str
    theorem: str | None = None
    c: float | None = None


def check_admissible(kernels: Sequence[Kernel], field: Field) -> Admissibility:
    """Decide whether ``Phi`` is guaranteed to be a homeomorphism.

    Returns
    -------
    Admissibility
        ``theorem`` is ``"positive-pm"`` (all constants positive) or
        ``"periodic"`` (constant zero plus an endpoint condition on the
        field).
    """
    n = len(kernels)
    if n < 1:
        return Admissibility(False, "need at least one kernel")
    census = validate_field(field, n)
    # interpolation fields finite at exactly x_0 = 0 < ... < x_n = 1 fail the
    # weighted census but still have a nonempty regularity set
    if not census.passed and finiteness_count(field, weighted=False) < n + 1:
        return Admissibility(False, f"field is finite at only {census.count} weighted "
                                    f"points; more than {n} are needed")
    if not all(k.singular for k in kernels):
        return Admissibility(False, "every kernel must be singular (K(0) = -inf)")
    pms = [k.pm_constant for k in kernels]
    if any(c is None for c in pms):
        return Admissibility(False, "a kernel has no declared monotonicity constant")
    c = min(pms)
    if c > 0:
        return Admissibility(True, "singular kernels with positive constants", "positive-pm", c)
    if not all(k.strictly_concave for k in kernels):
        return Admissibility(False, "zero monotonicity constant needs strictly concave kernels")
    if not any(field.hints.get(h, False) for h in ("inf_plus", "inf_minus",
                                                  "cusp_plus", "cusp_minus")):
        return Admissibility(False, "zero monotonicity constant needs a field that is "
                                    "singular or cusp-like at an endpoint")
    return Admissibility(True, "periodic-type kernels with endpoint-singular field",
                         "periodic", 0.0)


def _require_admissible(kernels, field):
    adm = check_admissible(kernels, field)
    if not adm.admissible:
        raise InvalidProblemError(f"inversion refused: {adm.reason}")
    return adm


# --------------------------------------------------------------------------
# initial point
# --------------------------------------------------------------------------

def _spread_midpoints(reps, n):
    reps = np.unique(np.asarray(reps, dtype=float))
    if reps.size < n + 1:
        return None
    idx = np.round(np.linspace(0, reps.size - 1, n + 1)).astype(int)
    chosen = reps[idx]
    return 0.5 * (chosen[1:] + chosen[:-1])


def _representatives(field: Field):
    pts = [t for t, v in field.points if v > -math.inf]
    for p in field.pieces:
        if p.hi > p.lo:
            pts.extend(np.linspace(p.lo, p.hi, 7)[1:-1].tolist())
        elif p.lo_closed and p.hi_closed:
            pts.append(p.lo)
    return np.array(sorted(pts))


def initial_point(kernels, field, seed=0) -> NodeSystem:
    """A regular starting node system.

    Discrete fields: midpoints between spread support points.  Otherwise the
    uniform nodes ``i/(n+1)``, then midpoints between finite
    representatives of the field, then seeded random nudges.
    """
    n = len(kernels)
    cands = []
    if field.kind == "discrete":
        y = _spread_midpoints([t for t, _ in field.points], n)
        if y is not None:
            cands.append(y)
    cands.append(np.arange(1, n + 1) / (n + 1))
    y = _spread_midpoints(_representatives(field), n)
    if y is not None:
        cands.append(y)
    for y in cands:
        if classify(field, kernels, y).regular:
            return NodeSystem(y)
    rng = np.random.default_rng(seed)
    base = cands[-1]
    scale = 0.5 / (n + 1)
    for _ in range(100):
        y = np.sort(np.clip(base + scale * rng.uniform(-1, 1, n), 1e-6, 1 - 1e-6))
        if np.all(np.diff(y) > 0) and classify(field, kernels, y).regular:
            return NodeSystem(y)
        scale *= 0.9
    raise InvalidProblemError("could not construct a regular initial node system")


# --------------------------------------------------------------------------
# Newton iteration
# --------------------------------------------------------------------------

class _State:
    def __init__(self, kernels, field, cfg):
        self.kernels = kernels
        self.field = field
        self.cfg = cfg
        self.iterations = 0
        self.last_jac = None

    def maxima(self, y):
        return interval_maxima(self.kernels, self.field, y, tol=self.cfg.tol, brackets=False)

    def admissible_point(self, y):
        ext = np.concatenate(([0.0], y, [1.0]))
        if np.any(np.diff(ext) <= self.cfg.boundary_margin):
            return False
        return classify(self.field, self.kernels, y).regular

    def jacobian(self, y, rep, h=None):
        cfg = self.cfg
        mode = cfg.jacobian_mode
        if h is None and mode in ("auto", "analytic"):
            try:
                est = analytic_jacobian(self.kernels, self.field, y, rep)
                if mode == "analytic" or est.dominance_margin >= LOW_MARGIN:
                    return est
            except NotApplicableError:
                if mode == "analytic":
                    raise
        # keep the stencil well inside the smallest gap
        gap = float(np.min(np.diff(np.concatenate(([0.0], y, [1.0])))))
        return fd_jacobian(self.kernels, self.field, y, h=min(h or cfg.fd_h, 0.25 * gap))


def _max_step(y, step, margin):
    """Largest ``alpha <= 1`` keeping ``y + alpha*step`` ordered (fraction 0.9)."""
    ext = np.concatenate(([0.0], y, [1.0]))
    dstep = np.diff(np.concatenate(([0.0], step, [0.0])))
    gaps = np.diff(ext) - margin
    shrink = dstep < 0
    alpha = 1.0
    if shrink.any():
        alpha = min(1.0, float(np.min(TRUNCATE * gaps[shrink] / -dstep[shrink])))
    return max(alpha, 0.0)


def _newton_dir(jac, r):
    try:
        step = np.linalg.solve(jac.matrix, -r)
        if np.all(np.isfinite(step)):
            return step
    except np.linalg.LinAlgError:
        pass
    step = np.linalg.lstsq(jac.matrix, -r, rcond=None)[0]
    return step if np.all(np.isfinite(step)) else None


def _newton(state: _State, y, rep, target, tol, budget, history=None, final_target=None):
    """Damped Newton towards ``target``; returns ``(y, rep, status)``.

    ``history`` (if given) receives the residual against ``final_target``
    whenever it strictly decreases.
    """
    cfg = state.cfg
    res = float(np.max(np.abs(rep.phi - target)))
    fails = 0
    fd_scales = [1.0, 10.0, 0.1, 100.0, 0.01]
    while res > tol:
        if state.iterations >= budget:
            return y, rep, "max-iters"
        state.iterations += 1
        r = rep.phi - target
        accepted = False
        h = None if fails == 0 else cfg.fd_h * fd_scales[fails % len(fd_scales)]
        try:
            jac = state.jacobian(y, rep, h=h)
        except NotRegularError:
            jac = None
        if jac is not None:
            state.last_jac = jac
        step = None if jac is None else _newton_dir(jac, r)
        if step is not None:
            alpha = _max_step(y, step, cfg.boundary_margin)
            for _ in range(cfg.max_halvings):
                if alpha <= 0:
                    break
                yt = y + alpha * step
                if state.admissible_point(yt):
                    rt = state.maxima(yt)
                    if rt.regular:
                        res_t = float(np.max(np.abs(rt.phi - target)))
                        if res_t <= (1.0 - ARMIJO_C1 * alpha) * res and res_t < res:
                            y, rep, res = yt, rt, res_t
                            accepted = True
                            break
                alpha *= cfg.damping
        if accepted:
            fails = 0
            if history is not None:
                fres = float(np.max(np.abs(rep.phi - final_target)))
                if fres < history[-1]:
                    history.append(fres)
        else:
            fails += 1
            logger.debug("line search failed (%d in a row) at y=%s", fails, y)
            if fails >= cfg.continuation_trigger:
                return y, rep, "stalled"
    return y, rep, "converged"


def solve_phi(kernels: Sequence[Kernel], field: Field, d, config: SolveConfig | None = None,
              y0=None) -> SolveReport:
    """Find the node system ``y`` with ``Phi(y) = d``.

    Parameters
    ----------
    kernels : sequence of Kernel
    field : Field
    d : array_like, shape (n,)
        Target difference vector.
    config : SolveConfig, optional
    y0 : NodeSystem or array_like, optional
        Regular starting point; constructed automatically when omitted.

    Returns
    -------
    SolveReport
        On ``status == "converged"`` the residual is at most
        ``config.residual_tol``.

    Raises
    ------
    InvalidProblemError
        When the problem class does not guarantee a unique solution.

    Examples
    --------
    >>> from sumtrans.kernels import make_log_kernel
    >>> from sumtrans.fields import make_zero_field
    >>> rep = solve_phi([make_log_kernel()] * 2, make_zero_field(), [0.0, 0.0])
    >>> np.round(rep.y_solution.nodes, 7).tolist()
    [0.1464466, 0.8535534]
    """
    cfg = config or SolveConfig()
    kernels = list(kernels)
    n = len(kernels)
    target = np.array(d, dtype=float, ndmin=1).ravel()
    if target.size != n:
        raise InvalidParameterError(f"target has {target.size} entries, expected {n}")
    if not np.all(np.isfinite(target)):
        raise InvalidParameterError("target must be finite")
    _require_admissible(kernels, field)
    if y0 is None:
        y = initial_point(kernels, field, cfg.seed).nodes.copy()
    else:
        y = as_nodes(y0).nodes.copy()
        if not classify(field, kernels, y).regular:
            raise InvalidParameterError("y0 is not a regular node system")
    state = _State(kernels, field, cfg)
    rep = state.maxima(y)
    history = [float(np.max(np.abs(rep.phi - target)))]
    y, rep, status = _newton(state, y, rep, target, cfg.residual_tol, cfg.max_iters,
                             history, target)
    legs = 0
    if status == "stalled":
        y, rep, status, legs = _continuation(state, y, rep, target, history)
    final = float(np.max(np.abs(rep.phi - target)))
    if final < history[-1]:
        history.append(final)
    if status == "stalled":
        status = "left-domain"
    msg = {"converged": "residual below tolerance",
           "max-iters": "iteration budget exhausted",
           "left-domain": "line search stalled at the boundary of the regularity set "
                          "or at the limit of floating-point resolution"}[status]
    return SolveReport(y_solution=NodeSystem(y), residual_history=history,
                       iterations=state.iterations, jacobian_diagnostics=state.last_jac,
                       status=status, target=target, phi=rep.phi.copy(), maxima=rep,
                       continuation_legs=legs, message=msg)


def _continuation(state, y, rep, target, history):
    """Follow ``d(s) = (1-s) Phi(y_start) + s d`` from ``s = 0`` to ``1``."""
    cfg = state.cfg
    start = rep.phi.copy()
    s, ds = 0.0, 1.0
    legs = 0
    leg_tol = max(cfg.residual_tol, 1e-8)
    while s < 1.0:
        if state.iterations >= cfg.max_iters:
            return y, rep, "max-iters", legs
        s_next = min(1.0, s + ds)
        goal = (1.0 - s_next) * start + s_next * target
        yt, rt, st = _newton(state, y, rep, goal, leg_tol, cfg.max_iters)
        legs += 1
        if st == "converged":
            y, rep, s = yt, rt, s_next
            ds *= 2.0
            fres = float(np.max(np.abs(rep.phi - target)))
            if fres < history[-1]:
                history.append(fres)
        else:
            ds *= 0.5
            if ds < cfg.min_leg:
                return y, rep, "left-domain", legs
    y, rep, status = _newton(state, y, rep, target, cfg.residual_tol, cfg.max_iters,
                             history, target)
    if status == "stalled":
        status = "left-domain"
    return y, rep, status, legs


def solve_equioscillation(kernels: Sequence[Kernel], field: Field,
                          config: SolveConfig | None = None, y0=None) -> SolveReport:
    """Solve ``Phi(y) = 0``: all interval maxima equal.

    The report additionally carries the common maximum ``m_bar`` and the
    equioscillation points ``t_points`` (one maximizer per interval).

    Examples
    --------
    >>> from sumtrans.kernels import make_log_kernel
    >>> from sumtrans.fields import make_zero_field
    >>> rep = solve_equioscillation([make_log_kernel()] * 3, make_zero_field())
    >>> round(rep.m_bar / math.log(2), 9)
    -5.0
    """
    n = len(kernels)
    rep = solve_phi(kernels, field, np.zeros(n), config, y0)
    rep.m_bar = float(np.max(rep.maxima.m))
    rep.t_points = rep.maxima.argmax.copy()
    return rep

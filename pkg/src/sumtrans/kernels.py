"""Kernel functions ``K: [-1, 1] -> R u {-inf}``.

A kernel is concave on ``(-1, 0)`` and on ``(0, 1)``.  It is stored as a
list of closed-form branches; each branch covers a sub-interval of one of the
two concavity intervals and carries its own derivative, so one-sided
derivatives at the junctions come from the respective side.  The value at
``0`` and at ``+-1`` is the one-sided limit, possibly ``-inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import DomainError, InvalidKernelError, InvalidParameterError

#: derivative queries closer than this to a singular point are refused
DERIV_EXCLUSION = 1e-12
JUNCTION_TOL = 1e-9
PM_TOL = 1e-9


@dataclass(frozen=True)
class KernelPiece:
    """One closed-form branch ``f`` (with derivative ``df``) on ``[lo, hi]``."""

    lo: float
    hi: float
    f: Callable
    df: Callable


def _limit(f, t):
    with np.errstate(all="ignore"):
        v = float(np.asarray(f(np.array([t], dtype=float)), dtype=float)[0])
    # kernels are bounded above, so an infinite limit is -inf (a +inf here
    # is a signed-zero artefact such as -1/(-0.0))
    if math.isnan(v) or math.isinf(v):
        return -math.inf
    return v


@dataclass(frozen=True, eq=False)
class Kernel:
    """A kernel function with evaluation, one-sided derivatives and metadata.

    Use the ``make_*_kernel`` constructors rather than building one directly.
    """

    pieces: tuple
    singular: bool
    strictly_concave: bool
    pm_constant: float | None
    name: str = "kernel"
    params: dict = field(default_factory=dict)
    endpoint_values: tuple = (-math.inf, -math.inf, -math.inf)

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.name}({args})"

    @property
    def breakpoints(self):
        """Interior junctions where the kernel may fail to be differentiable."""
        pts = {p.lo for p in self.pieces} | {p.hi for p in self.pieces}
        return tuple(sorted(b for b in pts if b not in (-1.0, 0.0, 1.0)))

    def eval(self, t):
        """Extended-real value ``K(t)``; accepts scalars or arrays."""
        arr = np.asarray(t, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if np.any(np.abs(arr) > 1.0):
            raise DomainError("kernel argument outside [-1, 1]")
        out = np.full(arr.shape, np.nan)
        with np.errstate(all="ignore"):
            for p in self.pieces:
                mask = (arr >= p.lo) & (arr <= p.hi) & np.isnan(out)
                if mask.any():
                    out[mask] = p.f(arr[mask])
        kneg, k0, kpos = self.endpoint_values
        out[arr == 0.0] = k0
        out[arr == -1.0] = kneg
        out[arr == 1.0] = kpos
        return float(out[0]) if scalar else out

    def _values_unchecked(self, arr):
        # fast path for the landscape search; caller guarantees |arr| <= 1
        out = np.empty_like(arr)
        with np.errstate(all="ignore"):
            if len(self.pieces) == 2:
                neg = arr < 0.0
                out[neg] = self.pieces[0].f(arr[neg])
                out[~neg] = self.pieces[1].f(arr[~neg])
            else:
                conds = [(arr >= p.lo) & (arr < p.hi) for p in self.pieces]
                choices = [p.f(arr) for p in self.pieces]
                out = np.select(conds, choices, default=np.nan)
        kneg, k0, kpos = self.endpoint_values
        out[arr == 0.0] = k0
        out[arr == -1.0] = kneg
        out[arr == 1.0] = kpos
        return out

    def _derivative(self, t, side):
        arr = np.asarray(t, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if np.any(np.abs(arr) >= 1.0) or np.any(np.abs(arr) < DERIV_EXCLUSION):
            raise DomainError("derivative requested outside (-1,0) u (0,1) "
                              "or too close to 0")
        kneg, _, kpos = self.endpoint_values
        near_edge = np.abs(arr) > 1.0 - DERIV_EXCLUSION
        if near_edge.any():
            bad = (near_edge & (arr > 0) & (kpos == -math.inf)) | \
                  (near_edge & (arr < 0) & (kneg == -math.inf))
            if bad.any():
                raise DomainError("derivative requested next to an infinite endpoint")
        out = np.full(arr.shape, np.nan)
        with np.errstate(all="ignore"):
            for p in self.pieces:
                if side < 0:
                    mask = (arr > p.lo) & (arr <= p.hi)
                else:
                    mask = (arr >= p.lo) & (arr < p.hi)
                mask &= np.isnan(out)
                if mask.any():
                    out[mask] = p.df(arr[mask])
        return float(out[0]) if scalar else out

    def d_minus(self, t):
        """Left derivative ``D-K(t)`` for ``t`` in ``(-1,0) u (0,1)``."""
        return self._derivative(t, -1)

    def d_plus(self, t):
        """Right derivative ``D+K(t)``."""
        return self._derivative(t, +1)


def make_piecewise_kernel(pieces: Sequence, *, strictly_concave=False,
                          pm_constant=None, name="piecewise", params=None):
    """Build a kernel from closed-form branches.

    Parameters
    ----------
    pieces : sequence of ``(lo, hi, f, df)``
        Branches covering ``[-1, 0]`` and ``[0, 1]`` without gaps, sorted by
        ``lo``.  ``f`` and ``df`` must accept numpy arrays.
    strictly_concave : bool
        Declared, not verified.
    pm_constant : float, optional
        Declared constant ``c`` of the periodized monotonicity condition.

    Raises
    ------
    InvalidKernelError
        If the branches leave gaps, cross ``0`` or disagree at a junction by
        more than ``1e-9``.
    """
    built = [p if isinstance(p, KernelPiece) else KernelPiece(float(p[0]), float(p[1]), p[2], p[3])
             for p in pieces]
    built.sort(key=lambda p: p.lo)
    if not built or built[0].lo != -1.0 or built[-1].hi != 1.0:
        raise InvalidKernelError("pieces must cover [-1, 1]")
    for p in built:
        if not p.lo < p.hi:
            raise InvalidKernelError(f"empty piece [{p.lo}, {p.hi}]")
        if p.lo < 0.0 < p.hi:
            raise InvalidKernelError("a piece may not straddle 0")
    for left, right in zip(built, built[1:]):
        if abs(left.hi - right.lo) > 0.0:
            raise InvalidKernelError(f"gap or overlap at {left.hi}/{right.lo}")
        a, b = _limit(left.f, left.hi), _limit(right.f, right.lo)
        if math.isinf(a) and math.isinf(b):
            continue
        if not (abs(a - b) <= JUNCTION_TOL):
            raise InvalidKernelError(
                f"branch values disagree at t={left.hi}: {a!r} vs {b!r}")
    k0 = _limit(next(p for p in built if p.hi == 0.0).f, 0.0)
    kneg = _limit(built[0].f, -1.0)
    kpos = _limit(built[-1].f, 1.0)
    if pm_constant is not None and pm_constant < 0:
        raise InvalidParameterError("pm_constant must be nonnegative")
    return Kernel(pieces=tuple(built), singular=(k0 == -math.inf),
                  strictly_concave=bool(strictly_concave),
                  pm_constant=None if pm_constant is None else float(pm_constant),
                  name=name, params=dict(params or {}),
                  endpoint_values=(kneg, k0, kpos))


def make_log_kernel(nu=1.0):
    """``K(t) = nu * log|t|``; singular, strictly concave, ``(PM_{4 nu})``."""
    nu = float(nu)
    if not nu > 0:
        raise InvalidParameterError(f"nu must be positive, got {nu}")
    f = lambda t: nu * np.log(np.abs(t))  # noqa: E731
    df = lambda t: nu / t  # noqa: E731
    return make_piecewise_kernel([(-1.0, 0.0, f, df), (0.0, 1.0, f, df)],
                                 strictly_concave=True, pm_constant=4.0 * nu,
                                 name="log", params={"nu": nu})


def make_sine_kernel(nu=1.0, a=1.0):
    """``K(t) = nu * log|sin(a*pi*t)|`` for ``0 < a <= 1``."""
    nu, a = float(nu), float(a)
    if not nu > 0:
        raise InvalidParameterError(f"nu must be positive, got {nu}")
    if not 0 < a <= 1:
        raise InvalidParameterError(f"a must lie in (0, 1], got {a}")
    w = a * math.pi
    f = lambda t: nu * np.log(np.abs(np.sin(w * t)))  # noqa: E731
    df = lambda t: nu * w / np.tan(w * t)  # noqa: E731
    if a == 1.0:
        pm = 0.0
    else:
        pm = 2.0 * nu * w * math.cos(w / 2) / math.sin(w / 2)
    kern = make_piecewise_kernel([(-1.0, 0.0, f, df), (0.0, 1.0, f, df)],
                                 strictly_concave=True, pm_constant=pm,
                                 name="sine", params={"nu": nu, "a": a})
    if a == 1.0:
        # sin(pi) is not exactly zero in floating point
        kern = Kernel(pieces=kern.pieces, singular=True, strictly_concave=True,
                      pm_constant=0.0, name="sine", params=kern.params,
                      endpoint_values=(-math.inf, -math.inf, -math.inf))
    return kern


def make_sqrt_kernel():
    """``K(t) = sqrt|t|``: concave and monotone but not singular."""
    return make_piecewise_kernel(
        [(-1.0, 0.0, lambda t: np.sqrt(-t), lambda t: -0.5 / np.sqrt(-t)),
         (0.0, 1.0, lambda t: np.sqrt(t), lambda t: 0.5 / np.sqrt(t))],
        strictly_concave=True, pm_constant=None, name="sqrt")


def make_reciprocal_kernel(nu=1.0):
    """``K(t) = -nu / (|t| (1 - |t|))``: singular, periodic, ``(PM_0)``."""
    nu = float(nu)
    if not nu > 0:
        raise InvalidParameterError(f"nu must be positive, got {nu}")

    def pos(t):
        return -nu / (t * (1.0 - t))

    def dpos(t):
        return nu * (1.0 - 2.0 * t) / (t * (1.0 - t)) ** 2

    return make_piecewise_kernel(
        [(-1.0, 0.0, lambda t: pos(-t), lambda t: -dpos(-t)),
         (0.0, 1.0, pos, dpos)],
        strictly_concave=True, pm_constant=0.0, name="reciprocal",
        params={"nu": nu})


def make_example81_kernel():
    """Periodic kernel ``min(log t, log 2(1-t))`` on ``(0,1)``, ``K(t)=K(t+1)`` on ``(-1,0)``."""
    third = 1.0 / 3.0
    return make_piecewise_kernel(
        [(-1.0, -third, lambda t: np.log(1.0 + t), lambda t: 1.0 / (1.0 + t)),
         (-third, 0.0, lambda t: np.log(-2.0 * t), lambda t: 1.0 / t),
         (0.0, 2.0 / 3.0, lambda t: np.log(t), lambda t: 1.0 / t),
         (2.0 / 3.0, 1.0, lambda t: np.log(2.0 * (1.0 - t)), lambda t: -1.0 / (1.0 - t))],
        strictly_concave=True, pm_constant=0.0, name="example81")


def check_pm(kernel: Kernel, c: float, grid_size: int = 1000) -> bool:
    """Sampled check of ``D-K(t) - D-K(t-1) >= c`` on a uniform interior grid.

    This verifies the condition at ``grid_size`` points only; it is not a
    proof.  The comparison allows a slack of ``1e-9``.
    """
    if grid_size < 2:
        raise InvalidParameterError("grid_size must be at least 2")
    t = np.linspace(0.0, 1.0, grid_size + 2)[1:-1]
    diff = kernel.d_minus(t) - kernel.d_minus(t - 1.0)
    return bool(np.all(diff >= c - PM_TOL))

"""Three one-node worked examples with closed-form interval maxima.

* ``"8.1"`` -- a periodic, piecewise-logarithmic kernel with a
  min-of-logs field.  ``Phi`` is continuous but has a kink at
  ``y = 7/30``.
* ``"8.2"`` -- the non-singular kernel ``sqrt|t|`` with a step field;
  ``Phi`` jumps at ``y = 1/2``.
* ``"8.3"`` -- the periodic kernel ``-1/(|t|(1-|t|))`` with a field that is
  ``1`` at the origin and ``0`` elsewhere; ``Phi`` is constant ``-1`` on a
  whole interval, so it is not injective.

The closed forms are hard-coded branch tables used as independent oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import InvalidParameterError
from .fields import constant_piece, make_piecewise_field
from .kernels import make_example81_kernel, make_reciprocal_kernel, make_sqrt_kernel
from .landscape import interval_maxima_batch

GOLDEN_PLATEAU_END = (5.0 + math.sqrt(5.0)) / 10.0


@dataclass(frozen=True)
class Example:
    """Kernels, field and closed-form ``m_0``, ``m_1`` of a worked example."""

    key: str
    kernels: tuple
    field: object
    m0: Callable
    m1: Callable
    description: str

    def phi(self, y):
        return self.m1(y) - self.m0(y)


def example81_field():
    """``J(t) = min(log 10t, 0, log 10(1-t))``."""
    return make_piecewise_field(
        [(0.0, 0.1, lambda t: np.log(10.0 * t), lambda t: 1.0 / t),
         constant_piece(0.1, 0.9, 0.0),
         (0.9, 1.0, lambda t: np.log(10.0 * (1.0 - t)), lambda t: -1.0 / (1.0 - t))],
        usc=True, name="example81")


def example82_field():
    """Step field: ``0`` on ``[0, 1/2)``, ``1`` on ``[1/2, 1]``."""
    return make_piecewise_field(
        [constant_piece(0.0, 0.5, 0.0, True, False), constant_piece(0.5, 1.0, 1.0)],
        usc=True, name="example82")


def example83_field():
    """``J(0) = 1`` and ``J = 0`` on ``(0, 1]``."""
    return make_piecewise_field([constant_piece(0.0, 1.0, 0.0, False, True)],
                                points=[(0.0, 1.0)], usc=True, name="example83")


def _m0_81(y):
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.select([y <= 0.2, y <= 13.0 / 30.0],
                         [np.log(5.0 * y ** 2), np.log(2.0 * (y - 0.1))],
                         default=math.log(2.0 / 3.0))


def _m1_81(y):
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.select([y < 7.0 / 30.0, y < 0.8],
                         [np.full_like(y, math.log(2.0 / 3.0)), np.log(0.9 - y)],
                         default=np.log(2.5 * (1.0 - y) ** 2))


def _m0_82(y):
    y = np.asarray(y, dtype=float)
    return np.where(y < 0.5, np.sqrt(y), np.sqrt(np.maximum(y - 0.5, 0.0)) + 1.0)


def _m1_82(y):
    y = np.asarray(y, dtype=float)
    return 1.0 + np.sqrt(1.0 - y)


def _m0_83(y):
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(y <= GOLDEN_PLATEAU_END, 1.0 - 1.0 / (y * (1.0 - y)), -4.0)


def _m1_83(y):
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(y <= 0.5, -4.0, -1.0 / (y * (1.0 - y)))


def phi83_closed(y):
    """Closed-form difference function of the third example."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        left = (-1.0 + 5.0 * y - 5.0 * y ** 2) / (y * (y - 1.0))
        right = (1.0 - 4.0 * y + 4.0 * y ** 2) / (y * (y - 1.0))
    return np.select([y < 0.5, y <= GOLDEN_PLATEAU_END], [left, np.full_like(y, -1.0)],
                     default=right)


def get_example(key) -> Example:
    """Return the worked example ``"8.1"``, ``"8.2"`` or ``"8.3"``."""
    key = str(key)
    if key == "8.1":
        return Example(key, (make_example81_kernel(),), example81_field(), _m0_81, _m1_81,
                       "periodic piecewise-log kernel; Phi has a kink at y = 7/30")
    if key == "8.2":
        return Example(key, (make_sqrt_kernel(),), example82_field(), _m0_82, _m1_82,
                       "non-singular kernel sqrt|t|; Phi jumps at y = 1/2")
    if key == "8.3":
        return Example(key, (make_reciprocal_kernel(),), example83_field(), _m0_83, _m1_83,
                       "periodic kernel without field singularity; Phi is not injective")
    raise InvalidParameterError(f"unknown example {key!r}; choose 8.1, 8.2 or 8.3")


def compare_example(key, grid: int = 2000, tol: float = 1e-10) -> dict:
    """Sweep ``y`` over an open uniform grid and compare with the closed forms.

    Returns
    -------
    dict
        Maximum absolute deviations of ``m_0``, ``m_1`` and ``Phi`` plus
        example-specific findings (kink location, jump size, plateau).
    """
    ex = get_example(key)
    ys = np.arange(1, grid) / grid
    reps = interval_maxima_batch(ex.kernels, ex.field, [[y] for y in ys], tol=tol,
                                 brackets=False)
    m = np.array([r.m for r in reps])
    dev0 = float(np.max(np.abs(m[:, 0] - ex.m0(ys))))
    dev1 = float(np.max(np.abs(m[:, 1] - ex.m1(ys))))
    with np.errstate(invalid="ignore"):
        devphi = float(np.max(np.abs((m[:, 1] - m[:, 0]) - ex.phi(ys))))
    out = {"example": key, "description": ex.description, "grid_points": int(ys.size),
           "max_dev_m0": dev0, "max_dev_m1": dev1, "max_dev_phi": devphi}
    if key == "8.1":
        # one-sided slopes of Phi around the kink
        kink = 7.0 / 30.0
        h = 1e-6
        pts = [[kink - 2 * h], [kink - h], [kink], [kink + h], [kink + 2 * h]]
        ph = np.array([r.phi[0] for r in interval_maxima_batch(ex.kernels, ex.field, pts)])
        out["kink_at"] = kink
        out["slope_left"] = float((ph[2] - ph[0]) / (2 * h))
        out["slope_right"] = float((ph[4] - ph[2]) / (2 * h))
    elif key == "8.2":
        eps = 1e-12
        r = interval_maxima_batch(ex.kernels, ex.field, [[0.5 - eps], [0.5]])
        left, at = float(r[0].phi[0]), float(r[1].phi[0])
        out["phi_left_limit"] = left
        out["phi_at_half"] = at
        out["jump"] = left - at
    elif key == "8.3":
        plateau = np.linspace(0.5, GOLDEN_PLATEAU_END, 201)
        r = interval_maxima_batch(ex.kernels, ex.field, [[y] for y in plateau], brackets=False)
        vals = np.array([x.phi[0] for x in r])
        out["plateau"] = [0.5, GOLDEN_PLATEAU_END]
        out["plateau_max_dev"] = float(np.max(np.abs(vals + 1.0)))
        pair = interval_maxima_batch(ex.kernels, ex.field, [[0.55], [0.7]], brackets=False)
        out["equal_phi_pair"] = {"y": [0.55, 0.7],
                                 "phi": [float(pair[0].phi[0]), float(pair[1].phi[0])]}
    return out

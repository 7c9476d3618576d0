"""Vectorized one-dimensional search primitives.

Every routine works on a batch of independent intervals at once: ``lo`` and
``hi`` are arrays and ``func`` maps an array of abscissae (one per interval)
to an array of values.  The batch form is what makes per-piece maximization
of the landscape affordable.
"""

from __future__ import annotations

import numpy as np

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(func, lo, hi, tol=1e-10, maxiter=200):
    """Maximize concave functions on a batch of intervals.

    Parameters
    ----------
    func : callable
        ``func(t) -> values`` evaluated elementwise; ``t`` has the shape of
        ``lo``.  Values may be ``-inf``.
    lo, hi : array_like
        Interval ends, ``lo <= hi``.
    tol : float
        Final interval width.

    Returns
    -------
    x, fx : ndarray
        Best abscissa found inside each interval and its value.
    """
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    width = hi - lo
    x1 = hi - INV_PHI * width
    x2 = lo + INV_PHI * width
    f1 = np.asarray(func(x1), dtype=float)
    f2 = np.asarray(func(x2), dtype=float)
    for _ in range(maxiter):
        active = (hi - lo) > tol
        if not active.any():
            break
        # concave: the maximizer lies in [lo, x2] when f1 >= f2
        left = (f1 >= f2) & active
        right = (~left) & active
        hi = np.where(left, x2, hi)
        lo = np.where(right, x1, lo)
        nx1 = np.where(left, hi - INV_PHI * (hi - lo), x2)
        nx2 = np.where(right, lo + INV_PHI * (hi - lo), x1)
        x1_new = np.where(left, nx1, np.where(right, x2, x1))
        x2_new = np.where(right, nx2, np.where(left, x1, x2))
        probe = np.where(left, x1_new, x2_new)
        fp = np.asarray(func(probe), dtype=float)
        f1, f2 = (np.where(left, fp, np.where(right, f2, f1)),
                  np.where(right, fp, np.where(left, f1, f2)))
        x1, x2 = x1_new, x2_new
    take_first = f1 >= f2
    return np.where(take_first, x1, x2), np.where(take_first, f1, f2)


def bisect_level(func, inside, outside, level, iters=60):
    """Locate where a monotone function crosses ``level`` between two points.

    ``func(inside) >= level`` and ``func(outside) < level`` are assumed
    elementwise.  Returns the last abscissa known to satisfy ``>= level``.
    """
    a = np.array(inside, dtype=float, ndmin=1)
    b = np.array(outside, dtype=float, ndmin=1)
    level = np.broadcast_to(np.asarray(level, dtype=float), a.shape)
    for _ in range(iters):
        mid = 0.5 * (a + b)
        ok = np.asarray(func(mid), dtype=float) >= level
        a = np.where(ok, mid, a)
        b = np.where(ok, b, mid)
        if np.all(np.abs(b - a) <= 1e-15 * np.maximum(1.0, np.abs(a))):
            break
    return a

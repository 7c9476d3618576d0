"""Sums of translates, interval maxima and the difference map.

For kernels ``K_1..K_n``, a field ``J`` and nodes ``0 <= y_1 <= ... <= y_n
<= 1`` the landscape is

    F(y, t) = J(t) + sum_k K_k(t - y_k),   t in [0, 1].

With ``y_0 = 0`` and ``y_{n+1} = 1`` the interval maxima are
``m_j(y) = sup {F(y, t) : y_j <= t <= y_{j+1}}`` and the difference map is
``Phi(y) = (m_1 - m_0, ..., m_n - m_{n-1})``.

Maximization strategy
---------------------
Each interval is cut into *segments* on which ``J`` is a single concave
branch and every kernel translate is a single branch, so ``F`` is concave
on each segment.  All segments of all requested node systems are searched
together by one vectorized golden-section run; segment end values (branch
limits) and isolated field points are compared explicitly.  Segment ends
that sit on a node of a singular kernel are excluded by an adaptive
separation radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from ._search import bisect_level, golden_section_max
from .exceptions import DomainError, InvalidParameterError, NotRegularError
from .fields import Field
from .kernels import Kernel

DEFAULT_TOL = 1e-10
Q_BRACKET = 1e-8
W_UNIQUE = 1e-7
TIE_TOL = 1e-12
DELTA_START = 1e-3
DELTA_MIN = 1e-12


class NodeSystem:
    """Ordered nodes ``y_1 <= ... <= y_n`` in ``[0, 1]``.

    Parameters
    ----------
    nodes : array_like
        The node vector.  Must be non-decreasing and inside ``[0, 1]``.

    Examples
    --------
    >>> NodeSystem([0.25, 0.75]).strict()
    True
    >>> NodeSystem([0.0, 0.5]).strict()
    False
    """

    __slots__ = ("_nodes",)

    def __init__(self, nodes):
        arr = np.array(nodes, dtype=float, ndmin=1).ravel()
        if arr.size == 0:
            raise InvalidParameterError("a node system needs n >= 1 nodes")
        if not np.all(np.isfinite(arr)):
            raise InvalidParameterError("nodes must be finite")
        if arr[0] < 0.0 or arr[-1] > 1.0 or np.any(np.diff(arr) < 0):
            raise InvalidParameterError("nodes must be ordered inside [0, 1]")
        arr.setflags(write=False)
        self._nodes = arr

    @property
    def nodes(self) -> np.ndarray:
        return self._nodes

    @property
    def n(self) -> int:
        return self._nodes.size

    def __len__(self):
        return self._nodes.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._nodes, dtype=dtype)

    def __repr__(self):
        return f"NodeSystem({self._nodes.tolist()!r})"

    def strict(self) -> bool:
        """True iff ``0 < y_1 < ... < y_n < 1`` (open simplex)."""
        ext = self.extended()
        return bool(np.all(np.diff(ext) > 0))

    def extended(self) -> np.ndarray:
        """``(0, y_1, ..., y_n, 1)``."""
        return np.concatenate(([0.0], self._nodes, [1.0]))


def as_nodes(y) -> NodeSystem:
    return y if isinstance(y, NodeSystem) else NodeSystem(y)


def _check_sizes(kernels, y: NodeSystem):
    if len(kernels) != y.n:
        raise InvalidParameterError(f"{len(kernels)} kernels for {y.n} nodes")


# --------------------------------------------------------------------------
# pointwise evaluation
# --------------------------------------------------------------------------

def eval_F(kernels: Sequence[Kernel], field: Field, y, t):
    """Evaluate ``F(y, t) = J(t) + sum_k K_k(t - y_k)`` in extended reals.

    Parameters
    ----------
    kernels : sequence of Kernel
        One kernel per node.
    field : Field
    y : NodeSystem or array_like
    t : float or array_like
        Points of ``[0, 1]``.

    Raises
    ------
    DomainError
        If some ``t`` lies outside ``[0, 1]``.

    Examples
    --------
    >>> from sumtrans.kernels import make_log_kernel
    >>> from sumtrans.fields import make_zero_field
    >>> round(eval_F([make_log_kernel()], make_zero_field(), [0.5], 0.25), 6)
    -1.386294
    """
    y = as_nodes(y)
    _check_sizes(kernels, y)
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(arr < 0.0) or np.any(arr > 1.0) or np.any(np.isnan(arr)):
        raise DomainError("t must lie in [0, 1]")
    total = field.eval(arr)
    for k, kern in enumerate(kernels):
        total = total + kern.eval(arr - y.nodes[k])
    return float(total[0]) if scalar else total


def _kernel_sum(kernels, D):
    """``sum_k K_k(D[:, k])`` for offsets ``D`` (rows: probes)."""
    n = D.shape[1]
    total = np.zeros(D.shape[0])
    logs = [k for k in range(n) if kernels[k].name == "log"]
    sines = [k for k in range(n) if kernels[k].name == "sine"]
    rest = [k for k in range(n) if k not in logs and k not in sines]
    with np.errstate(all="ignore"):
        if logs:
            nu = np.array([kernels[k].params["nu"] for k in logs])
            total += np.log(np.abs(D[:, logs])) @ nu
        if sines:
            nu = np.array([kernels[k].params["nu"] for k in sines])
            w = np.array([kernels[k].params["a"] for k in sines]) * math.pi
            Ds = D[:, sines]
            vals = np.log(np.abs(np.sin(Ds * w)))
            # exact endpoint values (sin(pi) is not zero in floating point)
            for c, k in enumerate(sines):
                kneg, _, kpos = kernels[k].endpoint_values
                vals[Ds[:, c] == 1.0, c] = kpos
                vals[Ds[:, c] == -1.0, c] = kneg
            total += vals @ nu
        for k in rest:
            total += kernels[k]._values_unchecked(D[:, k])
    total[np.isnan(total)] = -np.inf
    return total


# --------------------------------------------------------------------------
# interval maxima
# --------------------------------------------------------------------------

@dataclass
class MaximaReport:
    """Interval maxima of one node system.

    Attributes
    ----------
    nodes : ndarray
        The node vector ``y``.
    m : ndarray
        ``(m_0, ..., m_n)``, ``-inf`` on singular intervals.
    argmax : ndarray
        A representative maximizer ``z_j`` (``nan`` if ``m_j = -inf``).
    argmax_set : ndarray, shape (n+1, 2)
        Hull of all candidates attaining ``m_j`` up to rounding.
    brackets : ndarray, shape (n+1, 2), or None
        Hull of ``{t in I_j : F(y, t) >= m_j - q}`` with ``q = 1e-8``.
    phi : ndarray
        ``m_{j+1} - m_j`` in extended reals; ``nan`` where undefined.
    phi_defined : ndarray of bool
    regular : bool
        All ``m_j`` finite.
    unique : ndarray of bool
        Argmax set narrower than ``1e-7``.
    tol : float
        Golden-section tolerance in ``t``.
    delta_sep : float
        Smallest separation radius used around singular nodes (``nan`` if
        no singular node bounds a segment).
    grid_limited : bool
        Maxima rely on a sampled field.
    """

    nodes: np.ndarray
    m: np.ndarray
    argmax: np.ndarray
    argmax_set: np.ndarray
    brackets: np.ndarray | None
    phi: np.ndarray
    phi_defined: np.ndarray
    regular: bool
    unique: np.ndarray
    tol: float
    delta_sep: float
    grid_limited: bool = False
    segments: int = dc_field(default=0, repr=False)

    def to_dict(self):
        def enc(a):
            if a is None:
                return None
            return [_enc_float(v) for v in np.asarray(a, dtype=float).ravel()] \
                if np.ndim(a) == 1 else [[_enc_float(v) for v in row] for row in a]

        return {
            "nodes": enc(self.nodes), "m": enc(self.m), "argmax": enc(self.argmax),
            "argmax_set": enc(self.argmax_set), "brackets": enc(self.brackets),
            "phi": enc(self.phi), "phi_defined": [bool(v) for v in self.phi_defined],
            "regular": bool(self.regular), "unique": [bool(v) for v in self.unique],
            "tol": self.tol, "delta_sep": _enc_float(self.delta_sep),
            "grid_limited": bool(self.grid_limited),
        }


def _enc_float(v):
    v = float(v)
    if math.isnan(v):
        return None
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return v


class _Problem:
    """Segments and point candidates of a batch of node systems."""

    def __init__(self, kernels, field, systems):
        self.kernels = kernels
        self.field = field
        self.Y = np.array([s.nodes for s in systems])
        n = self.Y.shape[1]
        cut_offsets = sorted({b for kern in kernels for b in kern.breakpoints})
        seg = {"sys": [], "j": [], "lo": [], "hi": [], "piece": [], "lo_s": [], "hi_s": []}
        pts = {"sys": [], "j": [], "t": [], "J": []}
        gaps = []
        for s, y in enumerate(self.Y):
            ext = np.concatenate(([0.0], y, [1.0]))
            d = np.diff(ext)
            gaps.append(float(np.min(d[d > 0])) if np.any(d > 0) else 1.0)
            sing = {float(y[k]) for k in range(n) if kernels[k].singular}
            cuts = np.unique([y[k] + b for k in range(n) for b in kernels[k].breakpoints]
                             if cut_offsets else [])
            cuts = cuts[(cuts > 0.0) & (cuts < 1.0)]
            for j in range(n + 1):
                a, b = ext[j], ext[j + 1]
                for pi, p in enumerate(field.pieces):
                    lo, hi = max(p.lo, a), min(p.hi, b)
                    if lo > hi:
                        continue
                    if lo == hi:
                        if bool(p.contains(lo)):
                            with np.errstate(all="ignore"):
                                jv = float(p.f(np.array([lo]))[0])
                            pts["sys"].append(s)
                            pts["j"].append(j)
                            pts["t"].append(lo)
                            pts["J"].append(-math.inf if math.isnan(jv) else jv)
                        continue
                    inner = cuts[(cuts > lo) & (cuts < hi)]
                    edges = [lo, *inner.tolist(), hi]
                    for e0, e1 in zip(edges, edges[1:]):
                        seg["sys"].append(s)
                        seg["j"].append(j)
                        seg["lo"].append(e0)
                        seg["hi"].append(e1)
                        seg["piece"].append(pi)
                        seg["lo_s"].append(e0 in sing)
                        seg["hi_s"].append(e1 in sing)
                for t, v in field.points:
                    if a <= t <= b:
                        pts["sys"].append(s)
                        pts["j"].append(j)
                        pts["t"].append(t)
                        pts["J"].append(v)
        self.gaps = np.array(gaps)
        self.seg_sys = np.array(seg["sys"], dtype=int)
        self.seg_j = np.array(seg["j"], dtype=int)
        self.seg_lo = np.array(seg["lo"], dtype=float)
        self.seg_hi = np.array(seg["hi"], dtype=float)
        self.seg_piece = np.array(seg["piece"], dtype=int)
        self.seg_lo_s = np.array(seg["lo_s"], dtype=bool)
        self.seg_hi_s = np.array(seg["hi_s"], dtype=bool)
        consts = np.array([np.nan if p.const is None else p.const for p in field.pieces])
        self.seg_const = consts[self.seg_piece] if self.seg_piece.size else np.zeros(0)
        self.pt_sys = np.array(pts["sys"], dtype=int)
        self.pt_j = np.array(pts["j"], dtype=int)
        self.pt_t = np.array(pts["t"], dtype=float)
        self.pt_J = np.array(pts["J"], dtype=float)

    def F_seg(self, t, idx):
        """``F`` at ``t[i]`` using the branch of segment ``idx[i]``."""
        jv = self.seg_const[idx].copy()
        todo = np.isnan(jv)
        if todo.any():
            pieces = self.seg_piece[idx]
            with np.errstate(all="ignore"):
                for pid in np.unique(pieces[todo]):
                    mask = todo & (pieces == pid)
                    jv[mask] = self.field.pieces[pid].f(t[mask])
            jv[np.isnan(jv)] = -np.inf
        D = t[:, None] - self.Y[self.seg_sys[idx]]
        return jv + _kernel_sum(self.kernels, D)

    def F_pts(self):
        if self.pt_t.size == 0:
            return np.zeros(0)
        D = self.pt_t[:, None] - self.Y[self.pt_sys]
        total = self.pt_J.copy()
        for k, kern in enumerate(self.kernels):
            total = total + kern.eval(np.clip(D[:, k], -1.0, 1.0))
        total[np.isnan(total)] = -np.inf
        return total


def _search_segments(prob: _Problem, tol: float):
    """Golden-section search on all segments with adaptive node separation."""
    S = prob.seg_lo.size
    best_x = np.full(S, np.nan)
    best_f = np.full(S, -np.inf)
    delta = np.zeros(S)
    if S == 0:
        return best_x, best_f, delta
    width = prob.seg_hi - prob.seg_lo
    trimmed = prob.seg_lo_s | prob.seg_hi_s
    delta[trimmed] = np.minimum(DELTA_START * prob.gaps[prob.seg_sys[trimmed]],
                                0.25 * width[trimmed])
    todo = np.arange(S)
    while todo.size:
        lo = prob.seg_lo[todo] + np.where(prob.seg_lo_s[todo], delta[todo], 0.0)
        hi = prob.seg_hi[todo] - np.where(prob.seg_hi_s[todo], delta[todo], 0.0)
        x, fx = golden_section_max(lambda t, _i=todo: prob.F_seg(t, _i), lo, hi, tol=tol)
        best_x[todo], best_f[todo] = x, fx
        # the maximizer hugs a trimmed end: the exclusion radius was too large
        hug = ((prob.seg_lo_s[todo] & (x - lo <= 4 * tol))
               | (prob.seg_hi_s[todo] & (hi - x <= 4 * tol)))
        hug &= delta[todo] > DELTA_MIN
        todo = todo[hug]
        delta[todo] *= 0.1
    # explicit end candidates (branch limits) at ends that are not singular nodes
    for ends, sing in ((prob.seg_lo, prob.seg_lo_s), (prob.seg_hi, prob.seg_hi_s)):
        idx = np.nonzero(~sing)[0]
        if idx.size:
            fe = prob.F_seg(ends[idx], idx)
            better = fe >= best_f[idx]
            best_x[idx[better]] = ends[idx[better]]
            best_f[idx[better]] = fe[better]
    return best_x, best_f, delta


def _brackets(prob, seg_x, seg_f, pt_f, m, q):
    """Hull of the ``m_j - q`` superlevel set for every (system, interval)."""
    nsys, nint = m.shape
    lo_b = np.full((nsys, nint), np.inf)
    hi_b = np.full((nsys, nint), -np.inf)
    scale = q * np.maximum(1.0, np.abs(np.where(np.isfinite(m), m, 0.0)))
    level = m - scale
    if seg_f.size:
        lev = level[prob.seg_sys, prob.seg_j]
        qual = np.nonzero(np.isfinite(lev) & (seg_f >= lev))[0]
        if qual.size:
            x = seg_x[qual]
            lv = lev[qual]
            f_lo = prob.F_seg(prob.seg_lo[qual], qual)
            f_hi = prob.F_seg(prob.seg_hi[qual], qual)
            left = bisect_level(lambda t: prob.F_seg(t, qual), x, prob.seg_lo[qual], lv)
            right = bisect_level(lambda t: prob.F_seg(t, qual), x, prob.seg_hi[qual], lv)
            left = np.where(f_lo >= lv, prob.seg_lo[qual], left)
            right = np.where(f_hi >= lv, prob.seg_hi[qual], right)
            np.minimum.at(lo_b, (prob.seg_sys[qual], prob.seg_j[qual]), left)
            np.maximum.at(hi_b, (prob.seg_sys[qual], prob.seg_j[qual]), right)
    if pt_f.size:
        lev = level[prob.pt_sys, prob.pt_j]
        ok = np.isfinite(lev) & (pt_f >= lev)
        np.minimum.at(lo_b, (prob.pt_sys[ok], prob.pt_j[ok]), prob.pt_t[ok])
        np.maximum.at(hi_b, (prob.pt_sys[ok], prob.pt_j[ok]), prob.pt_t[ok])
    lo_b[~np.isfinite(m)] = np.nan
    hi_b[~np.isfinite(m)] = np.nan
    return np.stack([lo_b, hi_b], axis=-1)


def _phi_from_m(m):
    with np.errstate(invalid="ignore"):
        phi = m[1:] - m[:-1]
    defined = ~(np.isneginf(m[1:]) & np.isneginf(m[:-1]))
    phi = np.where(defined, phi, np.nan)
    return phi, defined


def interval_maxima_batch(kernels: Sequence[Kernel], field: Field, ys, tol=DEFAULT_TOL,
                          brackets=True):
    """:func:`interval_maxima` for many node systems in one vectorized pass.

    Returns
    -------
    list of MaximaReport
    """
    if not tol > 0:
        raise InvalidParameterError("tol must be positive")
    systems = [as_nodes(y) for y in ys]
    if not systems:
        return []
    n = systems[0].n
    for s in systems:
        if s.n != n:
            raise InvalidParameterError("all node systems must have the same size")
        _check_sizes(kernels, s)
    prob = _Problem(kernels, field, systems)
    seg_x, seg_f, delta = _search_segments(prob, tol)
    pt_f = prob.F_pts()
    nsys = len(systems)
    m = np.full((nsys, n + 1), -np.inf)
    # candidate lists (value, abscissa) per (system, interval)
    cand_f = np.concatenate([seg_f, pt_f])
    cand_x = np.concatenate([seg_x, prob.pt_t])
    cand_s = np.concatenate([prob.seg_sys, prob.pt_sys])
    cand_j = np.concatenate([prob.seg_j, prob.pt_j])
    if cand_f.size:
        np.maximum.at(m, (cand_s, cand_j), cand_f)
    mc = m[cand_s, cand_j]
    tie = np.isfinite(mc) & (cand_f >= mc - TIE_TOL * np.maximum(1.0, np.abs(
        np.where(np.isfinite(mc), mc, 0.0))))
    set_lo = np.full((nsys, n + 1), np.nan)
    set_hi = np.full((nsys, n + 1), np.nan)
    argmax = np.full((nsys, n + 1), np.nan)
    if tie.any():
        tmp_lo = np.full((nsys, n + 1), np.inf)
        tmp_hi = np.full((nsys, n + 1), -np.inf)
        np.minimum.at(tmp_lo, (cand_s[tie], cand_j[tie]), cand_x[tie])
        np.maximum.at(tmp_hi, (cand_s[tie], cand_j[tie]), cand_x[tie])
        fin = np.isfinite(m)
        set_lo[fin], set_hi[fin] = tmp_lo[fin], tmp_hi[fin]
        # representative: the exact best candidate
        order = np.lexsort((-cand_f, cand_j, cand_s))
        first = np.ones(order.size, dtype=bool)
        key = cand_s[order] * (n + 1) + cand_j[order]
        first[1:] = key[1:] != key[:-1]
        sel = order[first]
        ok = np.isfinite(cand_f[sel])
        argmax[cand_s[sel][ok], cand_j[sel][ok]] = cand_x[sel][ok]
    br = _brackets(prob, seg_x, seg_f, pt_f, m, Q_BRACKET) if brackets else None
    reports = []
    for s, sysn in enumerate(systems):
        phi, defined = _phi_from_m(m[s])
        dmask = (prob.seg_sys == s) & (delta > 0)
        dsep = float(np.min(delta[dmask])) if dmask.any() else math.nan
        aset = np.stack([set_lo[s], set_hi[s]], axis=-1)
        width = aset[:, 1] - aset[:, 0]
        reports.append(MaximaReport(
            nodes=sysn.nodes.copy(), m=m[s].copy(), argmax=argmax[s].copy(),
            argmax_set=aset, brackets=None if br is None else br[s].copy(),
            phi=phi, phi_defined=defined, regular=bool(np.all(np.isfinite(m[s]))),
            unique=np.isfinite(width) & (width <= W_UNIQUE), tol=float(tol),
            delta_sep=dsep, grid_limited=field.grid_limited,
            segments=int(np.count_nonzero(prob.seg_sys == s))))
    return reports


def interval_maxima(kernels: Sequence[Kernel], field: Field, y, tol=DEFAULT_TOL,
                    brackets=True) -> MaximaReport:
    """Interval maxima ``m_j(y)``, maximizers and the difference vector.

    Parameters
    ----------
    kernels : sequence of Kernel
        ``kernels[k]`` is translated by the ``k``-th node.
    field : Field
    y : NodeSystem or array_like
        Nodes in the closed simplex.
    tol : float, default 1e-10
        Golden-section tolerance in ``t``.
    brackets : bool, default True
        Also compute the near-maximizer brackets (costs a bisection pass).

    Returns
    -------
    MaximaReport
        Singular intervals are reported with ``m_j = -inf``.

    Examples
    --------
    >>> from sumtrans.kernels import make_log_kernel
    >>> from sumtrans.fields import make_zero_field
    >>> rep = interval_maxima([make_log_kernel()], make_zero_field(), [0.3])
    >>> np.round(np.exp(rep.m), 12).tolist(), rep.argmax.tolist()
    ([0.3, 0.7], [0.0, 1.0])
    """
    return interval_maxima_batch(kernels, field, [y], tol=tol, brackets=brackets)[0]


def phi(kernels: Sequence[Kernel], field: Field, y, tol=DEFAULT_TOL) -> np.ndarray:
    """Difference vector ``Phi(y) = (m_1 - m_0, ..., m_n - m_{n-1})``.

    Raises
    ------
    NotRegularError
        If some interval maximum is ``-inf``; ``err.index`` names it.
    """
    rep = interval_maxima(kernels, field, y, tol=tol, brackets=False)
    bad = np.nonzero(~np.isfinite(rep.m))[0]
    if bad.size:
        j = int(bad[0])
        raise NotRegularError(f"interval I_{j} is singular (m_{j} = -inf)", j)
    return rep.phi


# --------------------------------------------------------------------------
# classification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    """``regular``, ``degenerate`` or ``singular`` with the interval index."""

    status: str
    index: int | None = None

    def __str__(self):
        return f"singular({self.index})" if self.status == "singular" else self.status

    @property
    def regular(self):
        return self.status == "regular"


def _interval_finite_capable(field, a, b, bad_points):
    for p in field.pieces:
        lo, hi = max(p.lo, a), min(p.hi, b)
        if hi > lo:
            return True
        if hi == lo and bool(p.contains(lo)) and lo not in bad_points:
            return True
    for t, v in field.points:
        if a <= t <= b and v > -math.inf and t not in bad_points:
            return True
    return False


def classify(field: Field, kernels: Sequence[Kernel], y) -> Classification:
    """Classify a node system as regular, singular(j) or degenerate.

    Degenerate means the nodes are not strictly inside the open simplex.
    Otherwise interval ``j`` is singular when every point of ``I_j`` where
    ``J`` may be finite is a node of a singular kernel.  For a discrete
    field this is the exact combinatorial test.

    Examples
    --------
    >>> from sumtrans.kernels import make_log_kernel
    >>> from sumtrans.fields import make_discrete_field
    >>> fld = make_discrete_field([0.0, 0.5, 1.0])
    >>> str(classify(fld, [make_log_kernel()] * 2, [0.1, 0.2]))
    'singular(1)'
    """
    y = as_nodes(y)
    _check_sizes(kernels, y)
    if not y.strict():
        return Classification("degenerate")
    bad = {float(y.nodes[k]) for k in range(y.n) if kernels[k].singular}
    ext = y.extended()
    for j in range(y.n + 1):
        if not _interval_finite_capable(field, ext[j], ext[j + 1], bad):
            return Classification("singular", j)
    return Classification("regular")

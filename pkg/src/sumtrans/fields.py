"""External field functions ``J: [0, 1] -> R u {-inf}``.

Every field is stored as a finite list of *pieces* -- sub-intervals on which
``J`` is given by one concave closed-form branch -- plus a finite list of
isolated point values that override the pieces.  Outside both, ``J = -inf``.
This single representation covers all supported kinds:

* ``zero``      -- one piece ``[0, 1]`` with ``J = 0``;
* ``discrete``  -- no pieces, only point values (interpolation fields);
* ``logweight`` -- ``J = log w`` for a weight ``w >= 0``;
* ``piecewise`` -- user-supplied concave branches with declared closures;
* ``sampled``   -- nearest-sample cells with constant values.

Because every branch is concave, the landscape module can maximize
``F = J + sum K`` piece by piece with a golden-section search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ._search import golden_section_max
from .exceptions import InvalidParameterError

HINT_NAMES = ("inf_plus", "inf_minus", "cusp_plus", "cusp_minus")
_FD_STEP = 1e-7


def _const(c):
    c = float(c)
    return lambda t: np.full(np.shape(t), c)


def constant_piece(lo, hi, c, lo_closed=True, hi_closed=True):
    """Piece on which the field equals the constant ``c``."""
    return FieldPiece(float(lo), float(hi), _const(c), _const(0.0), lo_closed, hi_closed,
                      const=float(c))


@dataclass(frozen=True)
class FieldPiece:
    """Concave branch ``f`` of the field on the interval ``lo..hi``.

    ``lo_closed``/``hi_closed`` state whether the end itself belongs to the
    piece.  ``df`` is optional; a central difference is used without it.
    """

    lo: float
    hi: float
    f: Callable
    df: Callable | None = None
    lo_closed: bool = True
    hi_closed: bool = True
    const: float | None = None

    def contains(self, t):
        t = np.asarray(t, dtype=float)
        left = (t >= self.lo) if self.lo_closed else (t > self.lo)
        right = (t <= self.hi) if self.hi_closed else (t < self.hi)
        return left & right


@dataclass(frozen=True)
class FieldCensus:
    """Outcome of :func:`validate_field`."""

    count: float
    n: int
    passed: bool


@dataclass(frozen=True, eq=False)
class Field:
    """A field function with its singularity structure.

    Attributes
    ----------
    kind : str
        One of ``zero``, ``discrete``, ``logweight``, ``piecewise``,
        ``sampled``.
    pieces : tuple of FieldPiece
    points : tuple of (float, float)
        Isolated ``(t, J(t))`` values; they take precedence over pieces.
    hints : dict
        Endpoint conditions ``inf_plus``, ``inf_minus`` (``J -> -inf`` at
        ``0`` resp. ``1``) and ``cusp_plus``, ``cusp_minus`` (infinite
        one-sided slope there).
    usc : bool
        Declared upper semicontinuity.
    grid_limited : bool
        True for sampled fields, whose maxima are only as good as the grid.
    breaks : tuple of float
        Abscissae where ``J`` may fail to be differentiable.
    """

    kind: str
    pieces: tuple = ()
    points: tuple = ()
    hints: dict = field(default_factory=dict)
    usc: bool = True
    grid_limited: bool = False
    breaks: tuple = ()
    name: str = ""
    params: dict = field(default_factory=dict)

    def __repr__(self):
        return f"Field(kind={self.kind!r}, name={self.name!r})"

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        """Extended-real value ``J(t)``; scalars and arrays accepted."""
        arr = np.asarray(t, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        out = np.full(arr.shape, -np.inf)
        with np.errstate(all="ignore"):
            for p in self.pieces:
                mask = p.contains(arr)
                if mask.any():
                    out[mask] = p.f(arr[mask])
        for pt, val in self.points:
            out[arr == pt] = val
        out[np.isnan(out)] = -np.inf
        return float(out[0]) if scalar else out

    @property
    def support(self):
        """Where ``J`` may be finite: ``(intervals, points)``.

        ``intervals`` lists ``(lo, hi, lo_closed, hi_closed)`` per piece.
        """
        ivals = [(p.lo, p.hi, p.lo_closed, p.hi_closed) for p in self.pieces]
        pts = [pt for pt, val in self.points if val > -math.inf]
        return ivals, pts

    def slope(self, t, side=0):
        """Derivative of the branch active at ``t`` (one-sided if ``side``).

        ``side=-1`` uses the piece reaching ``t`` from the left, ``+1`` the
        piece leaving ``t`` to the right, ``0`` requires ``t`` to be interior
        to a piece.  Returns ``nan`` when no such piece exists.
        """
        t = float(t)
        for p in self.pieces:
            if side < 0:
                ok = p.lo < t <= p.hi
            elif side > 0:
                ok = p.lo <= t < p.hi
            else:
                ok = p.lo < t < p.hi
            if not ok:
                continue
            if p.df is not None:
                with np.errstate(all="ignore"):
                    return float(np.asarray(p.df(np.array([t])))[0])
            h = _FD_STEP
            if side <= 0:
                h = min(h, 0.5 * (t - p.lo))
            if side >= 0:
                h = min(h, 0.5 * (p.hi - t))
            if h <= 0:
                return math.nan
            if side < 0:
                a, b = t - h, t
            elif side > 0:
                a, b = t, t + h
            else:
                a, b = t - h, t + h
            with np.errstate(all="ignore"):
                va, vb = p.f(np.array([a, b]))
            return float((vb - va) / (b - a))
        return math.nan

    @property
    def upper_bound(self):
        """``sup J`` computed piece by piece (concave branches)."""
        best = -math.inf
        if self.pieces:
            lo = np.array([p.lo for p in self.pieces])
            hi = np.array([p.hi for p in self.pieces])

            def fvals(t):
                out = np.empty_like(t)
                with np.errstate(all="ignore"):
                    for k, p in enumerate(self.pieces):
                        out[k] = p.f(t[k:k + 1])[0]
                out[np.isnan(out)] = -np.inf
                return out

            _, fx = golden_section_max(fvals, lo, hi, tol=1e-12)
            best = max(best, float(np.max(fx)), float(np.max(fvals(lo))),
                       float(np.max(fvals(hi))))
        for _, val in self.points:
            best = max(best, val)
        return best


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------

def make_zero_field():
    """``J = 0`` on ``[0, 1]``; no endpoint singularity."""
    return Field(kind="zero", pieces=(constant_piece(0.0, 1.0, 0.0),),
                 hints=dict.fromkeys(HINT_NAMES, False), name="zero")


def make_discrete_field(points: Sequence[float], values: Sequence[float] | None = None):
    """Field finite exactly on a finite set (the interpolation field).

    Parameters
    ----------
    points : sequence of float
        Strictly increasing abscissae in ``[0, 1]``.
    values : sequence of float, optional
        Finite ``J`` values at the points (default 0).

    Examples
    --------
    >>> fld = make_discrete_field([0.2, 0.8], [math.log(2), 0.0])
    >>> round(fld.eval(0.2), 6), fld.eval(0.5)
    (0.693147, -inf)
    """
    pts = np.asarray(points, dtype=float).ravel()
    vals = np.zeros_like(pts) if values is None else np.asarray(values, dtype=float).ravel()
    if pts.size == 0:
        raise InvalidParameterError("a discrete field needs at least one point")
    if vals.shape != pts.shape:
        raise InvalidParameterError("points and values differ in length")
    if np.any(np.diff(pts) <= 0):
        raise InvalidParameterError("points must be strictly increasing")
    if pts[0] < 0 or pts[-1] > 1:
        raise InvalidParameterError("points must lie in [0, 1]")
    if not np.all(np.isfinite(vals)):
        raise InvalidParameterError("values must be finite")
    no0 = bool(pts[0] != 0.0)
    no1 = bool(pts[-1] != 1.0)
    hints = {"inf_plus": no0, "inf_minus": no1, "cusp_plus": no0, "cusp_minus": no1}
    return Field(kind="discrete",
                 points=tuple((float(p), float(v)) for p, v in zip(pts, vals)),
                 hints=hints, name="discrete",
                 params={"points": pts.tolist(), "values": vals.tolist()})


def make_piecewise_field(pieces, points=(), hints: Mapping | None = None,
                         usc=False, name="piecewise"):
    """Field assembled from concave branches.

    Parameters
    ----------
    pieces : sequence
        Items are :class:`FieldPiece` or tuples
        ``(lo, hi, f[, df[, lo_closed[, hi_closed]]])``.
    points : sequence of (t, value)
        Isolated values overriding the pieces.
    hints : mapping, optional
        Declared endpoint conditions; ``inf_plus``/``inf_minus`` are also
        detected automatically from the branch limits.
    """
    built = []
    for p in pieces:
        if not isinstance(p, FieldPiece):
            p = FieldPiece(float(p[0]), float(p[1]), *p[2:])
        if not (0.0 <= p.lo <= p.hi <= 1.0):
            raise InvalidParameterError(f"piece [{p.lo}, {p.hi}] outside [0, 1]")
        built.append(p)
    built.sort(key=lambda p: p.lo)
    pts = tuple((float(t), float(v)) for t, v in points)
    fld = Field(kind="piecewise", pieces=tuple(built), points=pts, usc=usc, name=name,
                breaks=tuple(sorted({p.lo for p in built} | {p.hi for p in built}
                                    - {0.0, 1.0})))
    auto = _endpoint_hints(fld)
    if hints:
        for k, v in hints.items():
            if k not in HINT_NAMES:
                raise InvalidParameterError(f"unknown hint {k!r}")
            auto[k] = auto[k] or bool(v)
    object.__setattr__(fld, "hints", auto)
    return fld


def _endpoint_hints(fld: Field):
    """``(inf_+)``/``(inf_-)`` from evaluation at and next to the ends."""
    eps = np.array([0.0, 1e-14, 1e-10])
    near0 = fld.eval(eps)
    near1 = fld.eval(1.0 - eps)
    # J(0) = -inf and J stays -inf or heads steeply down next to 0
    inf0 = bool(near0[0] == -np.inf and (np.all(near0 == -np.inf) or near0[1] < near0[2] - 5))
    inf1 = bool(near1[0] == -np.inf and (np.all(near1 == -np.inf) or near1[1] < near1[2] - 5))
    return {"inf_plus": inf0, "inf_minus": inf1, "cusp_plus": inf0, "cusp_minus": inf1}


def make_sampled_field(t, values, name="sampled"):
    """Field known only through samples; nearest-sample upper envelope.

    Each sample owns the cell between the midpoints to its neighbours; at a
    midpoint the larger neighbouring value is taken (upper semicontinuous
    envelope).  Maxima over such fields are flagged ``grid_limited``.
    """
    t = np.asarray(t, dtype=float).ravel()
    v = np.asarray(values, dtype=float).ravel()
    if t.size < 1 or v.shape != t.shape:
        raise InvalidParameterError("need matching, non-empty sample arrays")
    if np.any(np.diff(t) <= 0) or t[0] < 0 or t[-1] > 1:
        raise InvalidParameterError("sample abscissae must increase within [0, 1]")
    if np.any(np.isnan(v)) or np.any(v == np.inf):
        raise InvalidParameterError("sample values must be finite or -inf")
    edges = np.concatenate([[t[0]], 0.5 * (t[1:] + t[:-1]), [t[-1]]])
    pieces = []
    for k in range(t.size):
        if v[k] == -np.inf:
            continue
        lo_closed = k == 0 or v[k] >= v[k - 1]
        hi_closed = k == t.size - 1 or v[k] >= v[k + 1]
        pieces.append(constant_piece(edges[k], edges[k + 1], v[k], lo_closed, hi_closed))
    fld = Field(kind="sampled", pieces=tuple(pieces), grid_limited=True, name=name,
                breaks=tuple(edges[1:-1]), params={"t": t.tolist(), "values": v.tolist()})
    object.__setattr__(fld, "hints", _endpoint_hints(fld))
    return fld


def _as_weight_callable(w):
    if callable(w):
        return w
    raise InvalidParameterError(f"cannot interpret weight {w!r}")


def make_log_weight_field(w=None, breaks: Sequence[float] = (), name="logweight"):
    """Field ``J = log w`` of a nonnegative upper semicontinuous weight.

    Parameters
    ----------
    w : None, float, callable or mapping
        ``None`` or a positive constant gives a constant field.  A callable
        is evaluated on numpy arrays and must be log-concave between
        consecutive ``breaks``.  Mappings select a built-in family:

        * ``{"kind": "jacobi", "a": a, "b": b}`` -- ``t**a * (1-t)**b``;
        * ``{"kind": "step", "breaks": [...], "values": [...]}`` -- a step
          function, upper semicontinuous at the breaks;
        * ``{"kind": "samples", "t": [...], "w": [...]}`` -- sampled weight.
    breaks : sequence of float
        Points where a callable weight may be non-smooth.

    Raises
    ------
    InvalidParameterError
        For negative weights or malformed descriptions.

    Examples
    --------
    >>> fld = make_log_weight_field(lambda t: t * (1 - t))
    >>> round(fld.eval(0.5), 6), fld.hints["inf_plus"], fld.hints["inf_minus"]
    (-1.386294, True, True)
    """
    if w is None:
        w = 1.0
    if isinstance(w, (int, float)):
        if not w > 0:
            raise InvalidParameterError("a constant weight must be positive")
        c = math.log(float(w))
        return Field(kind="logweight", pieces=(constant_piece(0.0, 1.0, c),),
                     hints=dict.fromkeys(HINT_NAMES, False), name=name,
                     params={"w": float(w)})
    if isinstance(w, Mapping):
        kind = w.get("kind")
        if kind == "jacobi":
            return _jacobi_field(float(w.get("a", 0.0)), float(w.get("b", 0.0)), name)
        if kind == "step":
            return _step_field(w["breaks"], w["values"], name)
        if kind == "samples":
            wv = np.asarray(w["w"], dtype=float)
            if np.any(wv < 0):
                raise InvalidParameterError("weight samples must be nonnegative")
            with np.errstate(divide="ignore"):
                fld = make_sampled_field(w["t"], np.log(wv), name=name)
            return fld
        raise InvalidParameterError(f"unknown weight kind {kind!r}")
    func = _as_weight_callable(w)
    edges = sorted({0.0, 1.0} | {float(b) for b in breaks})
    if edges[0] < 0 or edges[-1] > 1:
        raise InvalidParameterError("breaks must lie in [0, 1]")
    probe = np.linspace(0.0, 1.0, 1001)
    with np.errstate(all="ignore"):
        wp = np.asarray(func(probe), dtype=float)
    if np.any(wp < 0):
        raise InvalidParameterError("weight takes negative values")

    def logw(t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.asarray(func(t), dtype=float))

    pieces = tuple(FieldPiece(a, b, logw) for a, b in zip(edges, edges[1:]))
    fld = Field(kind="logweight", pieces=pieces, name=name, breaks=tuple(edges[1:-1]))
    w0, w1 = float(func(np.array([0.0]))[0]), float(func(np.array([1.0]))[0])
    hints = {"inf_plus": w0 == 0.0, "inf_minus": w1 == 0.0,
             "cusp_plus": w0 == 0.0, "cusp_minus": w1 == 0.0}
    object.__setattr__(fld, "hints", hints)
    return fld


def _jacobi_field(a, b, name):
    if a < 0 or b < 0:
        raise InvalidParameterError("jacobi exponents must be nonnegative")

    def f(t):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.zeros_like(t)
            if a:
                out = out + a * np.log(t)
            if b:
                out = out + b * np.log1p(-t)
        return out

    def df(t):
        with np.errstate(divide="ignore"):
            return (a / t if a else 0.0) - (b / (1.0 - t) if b else 0.0) + np.zeros_like(t)

    hints = {"inf_plus": a > 0, "inf_minus": b > 0, "cusp_plus": a > 0, "cusp_minus": b > 0}
    return Field(kind="logweight", pieces=(FieldPiece(0.0, 1.0, f, df),), hints=hints,
                 name=name, params={"a": a, "b": b})


def _step_field(breaks, values, name):
    br = [float(b) for b in breaks]
    vals = [float(v) for v in values]
    if len(vals) != len(br) + 1:
        raise InvalidParameterError("a step weight needs len(values) == len(breaks) + 1")
    if any(v < 0 for v in vals):
        raise InvalidParameterError("weight values must be nonnegative")
    edges = [0.0] + br + [1.0]
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise InvalidParameterError("step breaks must increase strictly inside (0, 1)")
    pieces = []
    for k, v in enumerate(vals):
        if v == 0.0:
            continue
        lo_closed = k == 0 or v >= vals[k - 1]
        hi_closed = k == len(vals) - 1 or v >= vals[k + 1]
        pieces.append(constant_piece(edges[k], edges[k + 1], math.log(v), lo_closed, hi_closed))
    hints = {"inf_plus": vals[0] == 0.0, "inf_minus": vals[-1] == 0.0,
             "cusp_plus": vals[0] == 0.0, "cusp_minus": vals[-1] == 0.0}
    return Field(kind="logweight", pieces=tuple(pieces), hints=hints, name=name,
                 breaks=tuple(br), params={"breaks": br, "values": vals})


# --------------------------------------------------------------------------
# census
# --------------------------------------------------------------------------

def finiteness_count(fld: Field, weighted: bool = True) -> float:
    """Weighted number of points where ``J`` is finite.

    Interior points weigh 1, the endpoints ``0`` and ``1`` weigh 1/2 (or 1
    with ``weighted=False``); a piece of positive length contributes
    infinitely many points.
    """
    pts = set()
    for p in fld.pieces:
        if p.hi > p.lo:
            return math.inf
        if p.lo_closed and p.hi_closed:
            pts.add(p.lo)
    pts.update(t for t, v in fld.points if v > -math.inf)
    end_weight = 0.5 if weighted else 1.0
    return sum(end_weight if t in (0.0, 1.0) else 1.0 for t in pts)


def validate_field(fld: Field, n: int) -> FieldCensus:
    """Check that ``fld`` is an ``n``-field (finite at more than ``n`` points).

    Examples
    --------
    >>> validate_field(make_discrete_field([0.0, 1.0]), 1)
    FieldCensus(count=1.0, n=1, passed=False)
    >>> validate_field(make_discrete_field([0.0, 0.5, 1.0]), 1).passed
    True
    """
    if n < 1:
        raise InvalidParameterError("n must be at least 1")
    count = finiteness_count(fld)
    return FieldCensus(count=count, n=int(n), passed=bool(count > n))

"""JSON problem descriptions: kernel/field records and expression strings.

Kernel records::

    {"kind": "log", "nu": 1}
    {"kind": "sine", "nu": 1, "a": 0.5}
    {"kind": "sqrt"} | {"kind": "reciprocal", "nu": 1}
    {"kind": "example81"} | {"kind": "example83"}
    {"kind": "piecewise", "pieces": [{"lo": -1, "hi": 0, "f": "log(-t)"}, ...],
     "strictly_concave": true, "pm_constant": 4}

Field records::

    {"kind": "zero"}
    {"kind": "discrete", "points": [...], "values": [...]}
    {"kind": "logweight", "w": "t*(1-t)" | 2.0 | {"kind": "jacobi", ...}}
    {"kind": "piecewise", "pieces": [{"lo": 0, "hi": 1, "f": "log(t)"}], "points": [[t, v]]}
    {"kind": "sampled", "t": [...], "values": [...]}
    {"kind": "example81" | "example82" | "example83"}

Expressions are evaluated with a small whitelist of numpy functions; ``^``
means power.  They are meant for trusted, local input only.
"""

from __future__ import annotations

import ast
import hashlib
import json
import math
import re
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .exceptions import InvalidParameterError
from .fields import (FieldPiece, make_discrete_field, make_log_weight_field,
                     make_piecewise_field, make_sampled_field, make_zero_field)
from .gallery import example81_field, example82_field, example83_field
from .kernels import (KernelPiece, make_example81_kernel, make_log_kernel, make_piecewise_kernel,
                      make_reciprocal_kernel, make_sine_kernel, make_sqrt_kernel)
from .solver import SolveConfig

_FUNCS = {
    "log": np.log, "exp": np.exp, "sqrt": np.sqrt, "abs": np.abs, "sin": np.sin,
    "cos": np.cos, "tan": np.tan, "cot": lambda x: 1.0 / np.tan(x), "minimum": np.minimum,
    "maximum": np.maximum, "log1p": np.log1p, "sinh": np.sinh, "cosh": np.cosh,
}
_CONSTS = {"pi": math.pi, "e": math.e, "inf": math.inf}
_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load,
          ast.Constant, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)
_FD = 1e-7


def compile_expression(expr: str, var: str = "t"):
    """Turn ``expr`` (in the variable ``var``) into a vectorized callable.

    Examples
    --------
    >>> f = compile_expression("t^2 + abs(t)")
    >>> f(np.array([-2.0, 3.0])).tolist()
    [6.0, 12.0]
    """
    if not isinstance(expr, str) or not expr.strip():
        raise InvalidParameterError("expression must be a non-empty string")
    src = expr.replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise InvalidParameterError(f"cannot parse expression {expr!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _NODES):
            raise InvalidParameterError(f"disallowed syntax in {expr!r}")
        if isinstance(node, ast.Name) and node.id not in _FUNCS and node.id not in _CONSTS \
                and node.id != var:
            raise InvalidParameterError(f"unknown name {node.id!r} in {expr!r}")
        if isinstance(node, ast.Call) and not (isinstance(node.func, ast.Name)
                                               and node.func.id in _FUNCS):
            raise InvalidParameterError(f"only whitelisted functions may be called in {expr!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise InvalidParameterError(f"only numeric constants allowed in {expr!r}")
    code = compile(tree, "<expression>", "eval")
    namespace = {"__builtins__": {}, **_FUNCS, **_CONSTS}

    def func(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            out = eval(code, namespace, {var: t})  # noqa: S307 - whitelisted AST only
        return np.broadcast_to(np.asarray(out, dtype=float), t.shape).copy()

    func.expression = expr
    return func


def _numeric_derivative(f):
    def df(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            return (f(t + _FD) - f(t - _FD)) / (2.0 * _FD)
    return df


def _num(rec, key, default):
    v = rec.get(key, default)
    try:
        return float(v)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{key!r} must be a number, got {v!r}") from None


def kernel_from_record(rec):
    """Build a :class:`~sumtrans.kernels.Kernel` from a config record."""
    if isinstance(rec, str):
        rec = {"kind": rec}
    if not isinstance(rec, Mapping) or "kind" not in rec:
        raise InvalidParameterError(f"kernel record needs a 'kind': {rec!r}")
    kind = rec["kind"]
    if kind == "log":
        return make_log_kernel(_num(rec, "nu", 1.0))
    if kind == "sine":
        return make_sine_kernel(_num(rec, "nu", 1.0), _num(rec, "a", 1.0))
    if kind == "sqrt":
        return make_sqrt_kernel()
    if kind == "reciprocal" or kind == "example83":
        return make_reciprocal_kernel(_num(rec, "nu", 1.0))
    if kind == "example81":
        return make_example81_kernel()
    if kind == "piecewise":
        pieces = []
        for p in rec.get("pieces", []):
            f = compile_expression(p["f"])
            df = compile_expression(p["df"]) if "df" in p else _numeric_derivative(f)
            pieces.append(KernelPiece(float(p["lo"]), float(p["hi"]), f, df))
        pm = rec.get("pm_constant")
        return make_piecewise_kernel(pieces, strictly_concave=bool(rec.get("strictly_concave")),
                                     pm_constant=None if pm is None else float(pm),
                                     name=rec.get("name", "piecewise"))
    raise InvalidParameterError(f"unknown kernel kind {kind!r}")


def kernels_from_config(desc, n: int):
    """A list of ``n`` kernels from one record (repeated) or a list of records."""
    if n < 1:
        raise InvalidParameterError(f"n must be at least 1, got {n}")
    if desc is None:
        desc = {"kind": "log"}
    if isinstance(desc, (str, Mapping)):
        return [kernel_from_record(desc) for _ in range(n)]
    desc = list(desc)
    if len(desc) == 1:
        return [kernel_from_record(desc[0]) for _ in range(n)]
    if len(desc) != n:
        raise InvalidParameterError(f"{len(desc)} kernel records for n = {n}")
    return [kernel_from_record(r) for r in desc]


def parse_weight(w):
    """Weight description for :func:`make_log_weight_field`.

    Strings are compiled as expressions in ``t``; numbers and mappings pass
    through unchanged.
    """
    if w is None or isinstance(w, (int, float, Mapping)) or callable(w):
        return w
    if isinstance(w, str):
        try:
            return float(w)
        except ValueError:
            return compile_expression(w)
    raise InvalidParameterError(f"cannot interpret weight {w!r}")


def field_from_record(rec):
    """Build a :class:`~sumtrans.fields.Field` from a config record."""
    if rec is None:
        return make_zero_field()
    if isinstance(rec, str):
        rec = {"kind": rec}
    if not isinstance(rec, Mapping) or "kind" not in rec:
        raise InvalidParameterError(f"field record needs a 'kind': {rec!r}")
    kind = rec["kind"]
    if kind == "zero":
        return make_zero_field()
    if kind == "discrete":
        return make_discrete_field(rec["points"], rec.get("values"))
    if kind == "logweight":
        return make_log_weight_field(parse_weight(rec.get("w")), rec.get("breaks", ()))
    if kind == "piecewise":
        pieces = []
        for p in rec.get("pieces", []):
            f = compile_expression(p["f"])
            df = compile_expression(p["df"]) if "df" in p else None
            pieces.append(FieldPiece(float(p["lo"]), float(p["hi"]), f, df,
                                     bool(p.get("lo_closed", True)),
                                     bool(p.get("hi_closed", True))))
        return make_piecewise_field(pieces, rec.get("points", ()), rec.get("hints"),
                                    usc=bool(rec.get("usc", False)))
    if kind == "sampled":
        return make_sampled_field(rec["t"], rec["values"])
    if kind == "example81":
        return example81_field()
    if kind == "example82":
        return example82_field()
    if kind == "example83":
        return example83_field()
    raise InvalidParameterError(f"unknown field kind {kind!r}")


_POWER = re.compile(r"^\s*(\|t\||t|abs\(t\))\s*(?:(?:\^|\*\*)\s*([0-9.eE+-]+))?\s*$")


def factor_kernel(desc):
    """Kernel ``log|L|`` for an interpolation factor such as ``"t^2"``.

    Power factors map onto the log kernel; any other expression becomes a
    two-branch kernel with a numerical derivative (no monotonicity constant).
    """
    if isinstance(desc, Mapping):
        return kernel_from_record(desc)
    m = _POWER.match(str(desc))
    if m:
        return make_log_kernel(float(m.group(2)) if m.group(2) else 1.0)
    L = compile_expression(str(desc))

    def f(t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.abs(L(t)))

    df = _numeric_derivative(f)
    return make_piecewise_kernel([(-1.0, 0.0, f, df), (0.0, 1.0, f, df)],
                                 name=f"log|{desc}|")


def _floats(v, name):
    if v is None:
        return None
    if isinstance(v, str):
        v = [s for s in v.split(",") if s.strip()]
    try:
        return [float(x) for x in np.atleast_1d(v)]
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{name} must be a list of numbers") from None


@dataclass
class ProblemConfig:
    """A parsed problem file.

    Attributes
    ----------
    kernels, field : raw kernel/field records
    n : int or None
    target : list of float or None
    interpolation, bojanov : command-specific blocks
    output : mapping of output paths (``json``, ``csv``)
    solver : SolveConfig overrides
    raw : the original mapping (used for hashing)
    """

    kernels: Any = None
    field: Any = None
    n: int | None = None
    target: list | None = None
    interpolation: dict = dc_field(default_factory=dict)
    bojanov: dict = dc_field(default_factory=dict)
    output: dict = dc_field(default_factory=dict)
    solver: dict = dc_field(default_factory=dict)
    raw: dict = dc_field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: Mapping) -> "ProblemConfig":
        if not isinstance(d, Mapping):
            raise InvalidParameterError("a problem config must be a JSON object")
        known = {"kernels", "field", "n", "target", "interpolation", "bojanov", "output",
                 "solver", "y", "example"}
        extra = set(d) - known
        if extra:
            raise InvalidParameterError(f"unknown config keys: {sorted(extra)}")
        n = d.get("n")
        if n is not None:
            if isinstance(n, bool) or not isinstance(n, int):
                raise InvalidParameterError("n must be an integer")
            if n < 1:
                raise InvalidParameterError(f"n must be at least 1, got {n}")
        target = _floats(d.get("target"), "target")
        kernels = d.get("kernels")
        if n is None:
            if target is not None:
                n = len(target)
            elif isinstance(kernels, list) and len(kernels) > 1:
                n = len(kernels)
        if n is not None:
            if target is not None and len(target) != n:
                raise InvalidParameterError(f"target has {len(target)} entries, n = {n}")
            if isinstance(kernels, list) and len(kernels) not in (1, n):
                raise InvalidParameterError(f"{len(kernels)} kernel records, n = {n}")
        solver = dict(d.get("solver") or {})
        try:
            SolveConfig(**solver)
        except TypeError as exc:
            raise InvalidParameterError(f"bad solver overrides: {exc}") from None
        return cls(kernels=kernels, field=d.get("field"), n=n, target=target,
                   interpolation=dict(d.get("interpolation") or {}),
                   bojanov=dict(d.get("bojanov") or {}), output=dict(d.get("output") or {}),
                   solver=solver, raw=dict(d))

    def solve_config(self, **overrides) -> SolveConfig:
        return SolveConfig(**{**self.solver, **overrides})

    def build_kernels(self, n=None):
        n = self.n if n is None else n
        if n is None:
            raise InvalidParameterError("the number of nodes n is not specified")
        return kernels_from_config(self.kernels, n)

    def build_field(self):
        return field_from_record(self.field)


def load_config(path) -> ProblemConfig:
    """Read and validate a JSON problem file."""
    p = Path(path)
    if not p.is_file():
        raise InvalidParameterError(f"config file {str(p)!r} does not exist")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidParameterError(f"malformed JSON in {str(p)!r}: {exc}") from None
    return ProblemConfig.from_dict(data)


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, compact separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(obj) -> str:
    """SHA-256 of the canonical JSON of ``obj``."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()

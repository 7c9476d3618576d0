"""Command-line front end.

Every command prints (or writes with ``--out``) one JSON document::

    {"command": ..., "version": ..., "config_sha256": ..., "result": {...}}

Grids go to CSV files.  Exit codes: 0 success, 2 invalid input or problem,
3 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .applications import (InterpolationProblem, bojanov_extremal, hermite_fejer_moving_nodes,
                           lagrange_interpolate, trig_interpolate)
from .calculus import jacobian
from .config import (ProblemConfig, canonical_json, config_hash, factor_kernel,
                     field_from_record, kernels_from_config, load_config, parse_weight)
from .exceptions import ConvergenceError, SumTransError
from .gallery import compare_example, get_example
from .landscape import DEFAULT_TOL, NodeSystem, eval_F, interval_maxima
from .solver import solve_equioscillation, solve_phi

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NONCONVERGENCE = 3


class CLIError(SumTransError):
    """Malformed command-line input."""


# ---------------------------------------------------------------- encoding

def to_jsonable(obj):
    """Recursively convert numpy data and non-finite floats for JSON.

    ``-inf``/``inf`` become the strings ``"-inf"``/``"inf"``, ``nan`` becomes
    ``null``; finite floats keep Python's shortest round-trip repr.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps(doc) -> str:
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _cell(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------- parsing helpers

def _floats(text, name):
    if text is None:
        return None
    try:
        return [float(s) for s in str(text).split(",") if s.strip()]
    except ValueError:
        raise CLIError(f"--{name}: expected comma-separated numbers, got {text!r}") from None


def _record(text):
    """A kind name or an inline JSON record."""
    if text is None:
        return None
    text = text.strip()
    if text[:1] in "{[":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise CLIError(f"malformed inline JSON: {exc}") from None
    return {"kind": text}


def _problem(args) -> ProblemConfig:
    cfg = load_config(args.config) if args.config else ProblemConfig()
    if getattr(args, "kernels", None) is not None:
        cfg.kernels = _record(args.kernels)
    if getattr(args, "field", None) is not None:
        cfg.field = _record(args.field)
    if getattr(args, "n", None) is not None:
        if args.n < 1:
            raise CLIError(f"n must be at least 1, got {args.n}")
        cfg.n = args.n
    return cfg


def _solve_config(args, cfg: ProblemConfig):
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.tol is not None:
        over["tol"] = args.tol
    return cfg.solve_config(**over)


def _landscape(args):
    """Kernels, field and node system for eval/maxima/phi/sample."""
    example = getattr(args, "example", None)
    cfg = _problem(args)
    y = _floats(getattr(args, "y", None), "y")
    if y is None and "y" in cfg.raw:
        y = [float(v) for v in np.atleast_1d(cfg.raw["y"])]
    if example is None and "example" in cfg.raw:
        example = str(cfg.raw["example"])
    if example is not None:
        ex = get_example(example)
        kernels, field = list(ex.kernels), ex.field
    else:
        n = cfg.n if cfg.n is not None else (len(y) if y else None)
        if n is None:
            raise CLIError("the number of nodes is unknown: give --n, --y or a config with n")
        kernels = kernels_from_config(cfg.kernels, n)
        field = field_from_record(cfg.field)
    if y is None:
        raise CLIError("node positions are required (--y)")
    if len(y) != len(kernels):
        raise CLIError(f"{len(y)} node positions for {len(kernels)} kernels")
    return kernels, field, NodeSystem(y)


# ---------------------------------------------------------------- commands

def _tol(args):
    return DEFAULT_TOL if args.tol is None else args.tol


def cmd_eval(args):
    kernels, field, y = _landscape(args)
    if args.grid < 1:
        raise CLIError("--grid must be a positive integer")
    t = np.linspace(0.0, 1.0, args.grid + 1)
    F = eval_F(kernels, field, y, t)
    rep = interval_maxima(kernels, field, y, tol=_tol(args))
    csv_text = _csv_text(["t", "F"], zip(t, F))
    return {"maxima": rep.to_dict(), "grid": args.grid}, csv_text, EXIT_OK


def cmd_maxima(args):
    kernels, field, y = _landscape(args)
    rep = interval_maxima(kernels, field, y, tol=_tol(args))
    return {"maxima": rep.to_dict()}, None, EXIT_OK


def cmd_phi(args):
    kernels, field, y = _landscape(args)
    rep = interval_maxima(kernels, field, y, tol=_tol(args))
    out = {"phi": rep.phi, "phi_defined": rep.phi_defined, "regular": rep.regular,
           "m": rep.m}
    if args.jacobian:
        if not rep.regular:
            raise CLIError("the Jacobian needs a regular node system")
        out["jacobian"] = jacobian(kernels, field, y, mode=args.mode, report=rep).to_dict()
    return out, None, EXIT_OK


def cmd_solve(args):
    cfg = _problem(args)
    target = _floats(args.target, "target")
    if target is None:
        target = cfg.target
    sc = _solve_config(args, cfg)
    if args.equioscillate:
        n = cfg.n
        if n is None:
            raise CLIError("--equioscillate needs --n or a config with n")
        rep = solve_equioscillation(cfg.build_kernels(n), cfg.build_field(), sc)
    else:
        if target is None:
            raise CLIError("a target vector is required (--target or config 'target')")
        n = len(target)
        if cfg.n is not None and cfg.n != n:
            raise CLIError(f"target has {n} entries but n = {cfg.n}")
        rep = solve_phi(cfg.build_kernels(n), cfg.build_field(), target, sc)
    code = EXIT_OK if rep.converged else EXIT_NONCONVERGENCE
    return {"report": rep.to_dict()}, None, code


def _grid_csv(args, func):
    if not args.grid:
        return None
    t = np.linspace(0.0, 1.0, args.grid + 1)
    return _csv_text(["t", "G"], zip(t, func(t)))


def cmd_interpolate(args):
    cfg = _problem(args)
    block = cfg.interpolation
    sc = _solve_config(args, cfg)
    x = _floats(args.x, "x") or block.get("x")
    alpha = _floats(args.alpha, "alpha") or block.get("alpha")
    if alpha is None:
        raise CLIError("--alpha is required")
    alpha = np.asarray(alpha, dtype=float)
    if args.kind == "trig":
        if x is None:
            raise CLIError("--x is required")
        a = args.a if args.a is not None else block.get("a", 1.0)
        nu = args.nu if args.nu is not None else block.get("nu", 1.0)
        res = trig_interpolate(x, alpha, a=a, nu=nu, config=sc)
        grid = _grid_csv(args, res.G)
    else:
        n = alpha.size - 1
        if n < 1:
            raise CLIError("need at least two values in --alpha")
        factor = args.factor or block.get("factor")
        if factor is not None:
            kernels = [factor_kernel(factor) for _ in range(n)]
        else:
            kernels = kernels_from_config(cfg.kernels, n)
        if args.kind == "lagrange":
            if x is None:
                raise CLIError("--x is required")
            res = lagrange_interpolate(InterpolationProblem(kernels, x, alpha), sc)
            grid = _grid_csv(args, res.G)
        else:
            weight = args.weight if args.weight is not None else block.get("weight")
            res = hermite_fejer_moving_nodes(kernels, parse_weight(weight), alpha, sc)
            grid = _grid_csv(args, lambda t: res.C * np.exp(
                eval_F(res.kernels, res.field, res.nodes, t)))
    code = EXIT_OK if res.report.converged else EXIT_NONCONVERGENCE
    return {"kind": args.kind, "interpolation": res.to_dict()}, grid, code


def cmd_bojanov(args):
    cfg = _problem(args)
    block = cfg.bojanov
    nu = _floats(args.nu, "nu") or block.get("nu")
    if nu is None:
        raise CLIError("--nu is required")
    interval = _floats(args.interval, "interval") or block.get("interval", [0.0, 1.0])
    if len(interval) != 2:
        raise CLIError("--interval needs two numbers a,b")
    weight = args.weight if args.weight is not None else block.get("weight")
    res = bojanov_extremal(nu, parse_weight(weight), tuple(interval),
                           _solve_config(args, cfg))
    code = EXIT_OK if res.report.converged else EXIT_NONCONVERGENCE
    return {"bojanov": res.to_dict()}, None, code


def cmd_paper_example(args):
    out = compare_example(args.id, grid=args.grid, tol=_tol(args))
    return {"example": out}, None, EXIT_OK


COMMANDS = {
    "eval": cmd_eval, "sample": cmd_eval, "maxima": cmd_maxima, "phi": cmd_phi,
    "solve": cmd_solve, "interpolate": cmd_interpolate, "bojanov": cmd_bojanov,
    "paper-example": cmd_paper_example,
}


# ---------------------------------------------------------------- argparse

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON problem file")
    common.add_argument("--out", metavar="PATH",
                        help="write JSON here (CSV, if any, next to it with suffix .csv)")
    common.add_argument("--csv", metavar="PATH", help="explicit CSV output path")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized starts")
    common.add_argument("--tol", type=float, default=None, help="maximization tolerance")

    problem = argparse.ArgumentParser(add_help=False)
    problem.add_argument("--kernels", help="kernel kind (log, sine, ...) or inline JSON")
    problem.add_argument("--field", help="field kind (zero, ...) or inline JSON")
    problem.add_argument("--n", type=int, help="number of nodes")

    landscape = argparse.ArgumentParser(add_help=False)
    landscape.add_argument("--example", choices=["8.1", "8.2", "8.3"],
                           help="use a built-in worked example")
    landscape.add_argument("--y", help="comma-separated node positions")

    p = argparse.ArgumentParser(prog="sumtrans",
                                description="Sums of translates, interval maxima and the "
                                            "difference map.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    for name, helptext in (("eval", "F on a grid (CSV) plus interval maxima"),
                           ("sample", "same as eval; grid for external plotting")):
        s = sub.add_parser(name, parents=[common, problem, landscape], help=helptext)
        s.add_argument("--grid", type=int, default=1000, help="number of grid cells")

    sub.add_parser("maxima", parents=[common, problem, landscape], help="interval maxima report")

    s = sub.add_parser("phi", parents=[common, problem, landscape], help="difference map")
    s.add_argument("--jacobian", action="store_true", help="include Jacobian diagnostics")
    s.add_argument("--mode", choices=["auto", "analytic", "fd"], default="auto")

    s = sub.add_parser("solve", parents=[common, problem], help="solve Phi(y) = target")
    s.add_argument("--target", help="comma-separated target vector")
    s.add_argument("--equioscillate", action="store_true", help="solve Phi(y) = 0")

    s = sub.add_parser("interpolate", parents=[common, problem], help="interpolation problems")
    s.add_argument("kind", choices=["lagrange", "hermite-fejer", "trig"])
    s.add_argument("--x", help="abscissae")
    s.add_argument("--alpha", help="positive values")
    s.add_argument("--factor", help="factor L(t), e.g. t, t^2")
    s.add_argument("--weight", help="weight w(t), e.g. 't*(1-t)'")
    s.add_argument("--a", type=float, help="trigonometric frequency")
    s.add_argument("--nu", type=float, help="trigonometric multiplicity")
    s.add_argument("--grid", type=int, default=0, help="also sample G on this grid")

    s = sub.add_parser("bojanov", parents=[common], help="weighted Bojanov extremal problem")
    s.add_argument("--nu", help="comma-separated multiplicities")
    s.add_argument("--interval", help="a,b")
    s.add_argument("--weight", help="weight on [0, 1], e.g. 't*(1-t)'")

    s = sub.add_parser("paper-example", parents=[common],
                       help="compare a worked example with its closed forms")
    s.add_argument("--id", required=True, choices=["8.1", "8.2", "8.3"])
    s.add_argument("--grid", type=int, default=2000)
    return p


def _options_for_hash(args):
    skip = {"out", "csv", "config"}
    opts = {k: v for k, v in vars(args).items() if k not in skip}
    if args.config:
        opts["config_file"] = json.loads(Path(args.config).read_text())
    return opts


_LIST_OPTIONS = {"--y", "--target", "--x", "--alpha", "--nu", "--interval"}
_NUMERIC_LIST = re.compile(r"^-[0-9.]")


def _join_negative_lists(argv):
    """Turn ``--interval -1,1`` into ``--interval=-1,1``.

    argparse would otherwise read a leading minus sign as an option flag.
    """
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _LIST_OPTIONS and i + 1 < len(argv) and _NUMERIC_LIST.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_negative_lists(argv))
    try:
        result, csv_text, code = COMMANDS[args.command](args)
        digest = config_hash(to_jsonable(_options_for_hash(args)))
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (SumTransError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    doc = {"command": args.command, "version": __version__, "config_sha256": digest,
           "result": result}
    text = dumps(doc)
    csv_path = Path(args.csv) if args.csv else (
        Path(args.out).with_suffix(".csv") if args.out else None)
    if csv_text is not None and csv_path is not None:
        csv_path.write_text(csv_text)
        doc["csv"] = str(csv_path)
        text = dumps(doc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


__all__ = ["main", "main_entry", "build_parser", "to_jsonable", "dumps", "canonical_json"]


def main_entry():
    """Console-script entry point."""
    sys.exit(main())

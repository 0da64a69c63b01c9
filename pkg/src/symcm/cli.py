"""Command-line front end.

    symcm star A B             star product of two classical symbols
    symcm bracket A B          Moyal bracket
    symcm poisson A B          Poisson bracket
    symcm dequantize X         Weyl symbol of an operator (Q/P letters)
    symcm quantize A           symmetric quantization of a symbol
    symcm evolve H A -K n      Heisenberg (or Liouville) series of A
    symcm unitary H -K n       star-unitary series
    symcm eval A --point ...   value of a symbol at a phase-space point
    symcm classicality CONFIG  error-ket classicality report

Operands are expressions, or ``@path`` to read one from a file (text in
the expression grammar, or the JSON term schema).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .classicality import (
    ClassicalDatum,
    GaussianState,
    classicality_check,
    consistency_check,
)
from .dynamics import heisenberg_series, poisson_series, trajectory, unitary_series
from .errors import InternalConsistencyError, SymcmError
from .operators import OperatorPolynomial
from .phase import PhasePolynomial, poisson_bracket
from .scalars import rational_str, to_rational
from .series import EvolutionSeries
from .star import moyal_bracket, star
from .textio import (
    FormatError,
    ParseError,
    from_json_obj,
    parse_classical,
    parse_operator,
    render,
    trajectory_to_csv,
)
from .weyl import dequantize, quantize

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4


class UsageError(SymcmError, ValueError):
    """Bad flag value or operand combination (exit code 3)."""


def _read_operand(text: str, cls, dof: int):
    if text.startswith("@"):
        path = Path(text[1:])
        try:
            content = path.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        if content.lstrip().startswith("{"):
            try:
                obj = json.loads(content)
                value = from_json_obj(obj, cls)
            except json.JSONDecodeError as exc:
                raise ParseError(exc.msg, exc.lineno, exc.colno) from None
            except (KeyError, TypeError) as exc:
                raise ParseError(f"malformed term object in {path}: {exc}", 1, 1) from None
            if value.dof != dof:
                raise UsageError(f"{path} holds dof={value.dof}, but --dof is {dof}")
            return value
        text = content.strip()
    parser = parse_operator if cls is OperatorPolynomial else parse_classical
    return parser(text, dof)


def _classical(args, text):
    return _read_operand(text, PhasePolynomial, args.dof)


def _operator(args, text):
    return _read_operand(text, OperatorPolynomial, args.dof)


def _hbar_value(args):
    """None for symbolic hbar, else the rational value."""
    if args.hbar == "symbolic":
        return None
    try:
        return to_rational(args.hbar)
    except (ValueError, TypeError, ZeroDivisionError):
        raise UsageError(f"--hbar must be 'symbolic' or a rational, got {args.hbar!r}") from None


def _finish(value, args):
    h = _hbar_value(args)
    if h is not None:
        if isinstance(value, EvolutionSeries):
            value = EvolutionSeries([c.substitute_hbar(h) for c in value])
        else:
            value = value.substitute_hbar(h)
    return render(value, args.format)


def _point(args, dof: int) -> list:
    if args.point is None:
        raise UsageError("--point is required")
    try:
        values = [to_rational(x.strip()) for x in args.point.split(",")]
    except (ValueError, TypeError, ZeroDivisionError):
        raise UsageError(f"--point must be comma-separated rationals, got {args.point!r}") from None
    if len(values) != 2 * dof:
        raise UsageError(f"--point needs {2 * dof} coordinates (q0..q{dof - 1}, p0..p{dof - 1})")
    return values


def _order(args) -> int:
    if args.order is None:
        raise UsageError("--order is required for this command")
    if args.order < 0:
        raise UsageError("--order must be nonnegative")
    return args.order


def cmd_star(args):
    return _finish(star(_classical(args, args.a), _classical(args, args.b)), args)


def cmd_bracket(args):
    return _finish(moyal_bracket(_classical(args, args.a), _classical(args, args.b)), args)


def cmd_poisson(args):
    return _finish(poisson_bracket(_classical(args, args.a), _classical(args, args.b)), args)


def cmd_dequantize(args):
    return _finish(dequantize(_operator(args, args.x)), args)


def cmd_quantize(args):
    return _finish(quantize(_classical(args, args.a)), args)


def cmd_evolve(args):
    order = _order(args)
    h = _classical(args, args.h)
    a = _classical(args, args.a)
    if args.point is not None:
        hbar = _hbar_value(args)
        if hbar is None:
            raise UsageError("a trajectory table needs a rational --hbar")
        if args.format != "csv":
            raise FormatError("trajectory tables are written as csv")
        if args.steps < 1:
            raise UsageError("--steps must be positive")
        tmax = to_rational(args.tmax)
        times = [tmax * j / args.steps for j in range(args.steps + 1)]
        return trajectory_to_csv(trajectory(h, a, order, _point(args, h.dof), hbar, times))
    build = poisson_series if args.method == "poisson" else heisenberg_series
    return _finish(build(h, a, order), args)


def cmd_unitary(args):
    u = unitary_series(_classical(args, args.h), _order(args))
    return _finish(EvolutionSeries(u.coefficients), args)


def cmd_eval(args):
    hbar = _hbar_value(args)
    if hbar is None:
        raise UsageError("eval needs a rational --hbar")
    a = _classical(args, args.a)
    return render(a.evaluate(_point(args, a.dof), hbar), args.format)


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(cfg, dict):
        raise UsageError("classicality config must be a JSON object")
    return cfg


def cmd_classicality(args):
    """Config keys: means, covariances, centers, margins, observables, order, p_grid (optional)."""
    hbar = _hbar_value(args)
    if hbar is None:
        raise UsageError("classicality needs a rational --hbar")
    if args.format == "csv":
        raise FormatError("csv output is only defined for series")
    cfg = _load_config(args.config)
    try:
        state = GaussianState(tuple(map(tuple, cfg["means"])), tuple(map(tuple, cfg["covariances"])), hbar)
        datum = ClassicalDatum(tuple(cfg["centers"]), tuple(cfg["margins"]))
        observables = [parse_classical(str(t), state.dof) for t in cfg["observables"]]
        order = int(cfg.get("order", args.order if args.order is not None else 1))
        grid = cfg.get("p_grid")
    except KeyError as exc:
        raise UsageError(f"classicality config is missing {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SymcmError):
            raise
        raise UsageError(f"bad classicality config: {exc}") from None
    if state.dof != args.dof:
        raise UsageError(f"config describes dof={state.dof}, but --dof is {args.dof}")
    report = classicality_check(state, datum, observables, order)
    consistent = consistency_check(state, datum, order, grid) if grid is not None else None
    if args.format == "json":
        obj = report.to_json_obj()
        obj["hbar"] = rational_str(hbar)
        if consistent is not None:
            obj["consistency"] = consistent
        return json.dumps(obj, indent=2) + "\n"
    text = report.to_text()
    if consistent is not None:
        names = [f"q{i}" for i in range(state.dof)] + [f"p{i}" for i in range(state.dof)]
        text += "consistency: " + ", ".join(
            f"{n}={'pass' if ok else 'FAIL'}" for n, ok in zip(names, consistent)
        ) + "\n"
    return text


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dof", type=int, default=1, help="degrees of freedom N (default 1)")
    common.add_argument("--order", "-K", type=int, default=None, help="series truncation order")
    common.add_argument("--hbar", default="symbolic", help="'symbolic' (default) or a rational value")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--out", default=None, help="write output to PATH instead of stdout")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="symcm", description="Exact phase-space quantum mechanics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="COMMAND")

    def verb(name, func, help_, *operands):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        for op in operands:
            p.add_argument(op)
        p.set_defaults(func=func)
        return p

    verb("star", cmd_star, "star product A * B of classical symbols", "a", "b")
    verb("bracket", cmd_bracket, "Moyal bracket [A, B]_M", "a", "b")
    verb("poisson", cmd_poisson, "Poisson bracket {A, B}", "a", "b")
    verb("dequantize", cmd_dequantize, "Weyl symbol of an operator polynomial", "x")
    verb("quantize", cmd_quantize, "symmetric quantization of a classical symbol", "a")
    ev = verb("evolve", cmd_evolve, "time-series coefficients of A under Hamiltonian H", "h", "a")
    ev.add_argument("--method", choices=("moyal", "poisson"), default="moyal")
    ev.add_argument("--point", default=None, help="comma-separated q0..,p0.. for a trajectory table")
    ev.add_argument("--tmax", default="1", help="last time of the trajectory table (rational)")
    ev.add_argument("--steps", type=int, default=10, help="number of time steps in the table")
    verb("unitary", cmd_unitary, "star-unitary U(t) for Hamiltonian H", "h")
    e = verb("eval", cmd_eval, "evaluate a classical symbol at a point", "a")
    e.add_argument("--point", default=None, help="comma-separated q0..,p0..")
    verb("classicality", cmd_classicality, "classicality report for a Gaussian state", "config")
    return parser


def run(argv=None) -> tuple:
    """(exit code, stdout text, stderr text); never raises for user errors."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", ""
    try:
        if args.dof < 1:
            raise UsageError("--dof must be a positive integer")
        output = args.func(args)
    except ParseError as exc:
        return EXIT_PARSE, "", f"parse error: {exc}\n"
    except InternalConsistencyError as exc:
        return EXIT_INTERNAL, "", f"internal consistency failure: {exc}\n"
    except (SymcmError, ValueError) as exc:
        return EXIT_PRECONDITION, "", f"error: {exc}\n"
    if args.out:
        try:
            Path(args.out).write_text(output)
        except OSError as exc:
            return EXIT_PRECONDITION, "", f"error: cannot write {args.out}: {exc.strerror}\n"
        return EXIT_OK, "", ""
    return EXIT_OK, output, ""


def main(argv=None) -> int:
    code, out, err = run(argv)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())

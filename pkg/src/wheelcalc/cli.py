"""Command line front end.

Every subcommand prints a text report or, with ``--format json``, one
deterministic JSON document holding the inputs and the outputs.  Exit codes:
0 on success, 1 when a property check fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections.abc import Sequence
from typing import Any, Callable, Optional

from . import quiver as quivers
from .calculus import double_bracket, lifted_cobracket, necklace_bracket, necklace_cobracket, wheeled_bracket
from .checks import SUITES, CheckConfig, run_suite
from .connections import Connection, bv_operator, curvature_trace, torsion
from .expr import EvalError, ParseError, parse_ncpoly, parse_op, parse_wheel
from .paths import Tensor, format_sum, path_str
from .quiver import Quiver, QuiverError
from .rep import DimVector, RepError, RepPoint, ev_wheel
from .wheels import WheelElement, WheelError

PRESETS: dict[str, Callable[..., Quiver]] = {
    "one_loop": quivers.one_loop,
    "kronecker": quivers.kronecker,
    "cyclic_two": quivers.cyclic_two,
}

# star parity used when --parity is not given
ODD_BY_DEFAULT = {"bv", "torsion", "curvtrace"}


class UsageError(ValueError):
    pass


def load_quiver(spec: str, parity: int) -> Quiver:
    """A preset name (one_loop, loops:N, kronecker, cyclic_two) or a JSON file."""
    if spec in PRESETS:
        return PRESETS[spec](star_parity=parity)
    if spec.startswith("loops:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad preset {spec!r}") from None
        return quivers.loops(n, star_parity=parity)
    try:
        q = Quiver.load(spec)
    except OSError as exc:
        raise UsageError(f"cannot read quiver file {spec!r}: {exc.strerror}") from None
    return q.with_options(star_parity=parity)


def render_tensor(t: Tensor, wrap: Sequence[bool]) -> str:
    """Tensor text with the slots flagged in wrap printed as necklaces."""
    q = t.quiver

    def slot(k: int, p) -> str:
        s = path_str(q, p)
        return f"[{s}]" if wrap[k] else s

    items = sorted(t.terms.items(), key=lambda kv: tuple((len(p.word), p.word, p.tail) for p in kv[0]))
    return format_sum([(c, " # ".join(slot(k, p) for k, p in enumerate(key))) for key, c in items])


def _is_f0(u: WheelElement) -> bool:
    return u.degrees() <= {0}


# --------------------------------------------------------------------------
# Subcommands; each returns (inputs, output text, extra json fields, exit code)
# --------------------------------------------------------------------------
Report = tuple[dict[str, Any], str, dict[str, Any], int]


def cmd_bracket(q: Quiver, args: argparse.Namespace) -> Report:
    a, b = parse_wheel(q, args.a), parse_wheel(q, args.b)
    kind = args.kind
    if kind == "auto":
        kind = "necklace" if _is_f0(a) and _is_f0(b) else "wheeled"
    out = necklace_bracket(a, b) if kind == "necklace" else wheeled_bracket(a, b)
    return {"a": args.a, "b": args.b, "kind": kind}, str(out), {"terms": out.to_json()}, 0


def cmd_dbracket(q: Quiver, args: argparse.Namespace) -> Report:
    out = double_bracket(parse_ncpoly(q, args.a), parse_ncpoly(q, args.b))
    return {"a": args.a, "b": args.b}, str(out), {}, 0


def cmd_cobracket(q: Quiver, args: argparse.Namespace) -> Report:
    a = parse_wheel(q, args.a)
    if _is_f0(a):
        text = render_tensor(necklace_cobracket(a), (True, True))
        kind = "necklace"
    else:
        text = render_tensor(lifted_cobracket(parse_ncpoly(q, args.a)), (False, True))
        kind = "lifted"
    return {"a": args.a, "kind": kind}, text, {}, 0


def _connection(q: Quiver, path: Optional[str]) -> Connection:
    if path is None:
        return Connection.trivial(q)
    try:
        return Connection.load(q, path)
    except OSError as exc:
        raise UsageError(f"cannot read connection file {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"connection file is not valid JSON: {exc}") from None


def cmd_bv(q: Quiver, args: argparse.Namespace) -> Report:
    conn = _connection(q, args.connection)
    out = bv_operator(conn, parse_wheel(q, args.a))
    inputs = {"a": args.a, "connection": conn.to_json()}
    return inputs, str(out), {"terms": out.to_json()}, 0


def _require_connection(q: Quiver, args: argparse.Namespace) -> Connection:
    if args.connection is None:
        raise UsageError("--connection FILE is required")
    return _connection(q, args.connection)


def cmd_torsion(q: Quiver, args: argparse.Namespace) -> Report:
    conn = _require_connection(q, args)
    out = torsion(conn)
    return {"connection": conn.to_json()}, str(out), {"torsion_free": not out}, 0


def cmd_curvtrace(q: Quiver, args: argparse.Namespace) -> Report:
    conn = _require_connection(q, args)
    out = curvature_trace(conn)
    return {"connection": conn.to_json()}, str(out), {"terms": out.to_json()}, 0


def cmd_symbol(q: Quiver, args: argparse.Namespace) -> Report:
    op = parse_op(q, args.op)
    part = op.order_part(args.n)
    extra = {"order": op.order, "terms": part.to_json()}
    return {"op": args.op, "n": args.n}, str(part), extra, 0


def cmd_apply(q: Quiver, args: argparse.Namespace) -> Report:
    out = parse_op(q, args.op)(parse_wheel(q, args.a))
    return {"op": args.op, "a": args.a}, str(out), {"terms": out.to_json()}, 0


def cmd_ev(q: Quiver, args: argparse.Namespace) -> Report:
    dim = DimVector.parse(q, args.dim)
    if args.point is None:
        point = RepPoint.symbolic(q, dim)
    else:
        try:
            point = RepPoint.load(q, dim, args.point)
        except OSError as exc:
            raise UsageError(f"cannot read point file {args.point!r}: {exc.strerror}") from None
    got = ev_wheel(parse_wheel(q, args.a), point)
    inputs = {"a": args.a, "dim": args.dim, "point": args.point}
    if got.degree == 0:
        val = got.scalar()
        return inputs, str(val), {"value": val.to_json()}, 0
    return inputs, str(got), {"value": got.to_json()}, 0


def cmd_check(q: Quiver, args: argparse.Namespace) -> Report:
    cfg = CheckConfig(seed=args.seed, max_len=args.max_len, max_deg=args.max_deg, scale=args.scale)
    start = time.perf_counter()
    results = run_suite(args.suite, cfg)
    elapsed = time.perf_counter() - start
    lines = [r.line() for r in results]
    for r in results:
        if r.counterexample is not None:
            lines.append(f"  counterexample for {r.suite}.{r.name}:")
            lines += [f"    {k} = {v}" for k, v in sorted(r.counterexample.items())]
    ok = all(r.passed for r in results)
    summary = f"{'PASS' if ok else 'FAIL'} {args.suite}: {len(results)} properties"
    # timings stay out of JSON so that reports are byte-identical across runs
    lines.append(summary if args.format == "json" else f"{summary} in {elapsed:.1f}s")
    inputs = {"suite": args.suite, "seed": args.seed, "max_len": args.max_len, "max_deg": args.max_deg}
    extra = {"passed": ok, "properties": [r.to_json() for r in results]}
    return inputs, "\n".join(lines), extra, 0 if ok else 1


COMMANDS = {
    "bracket": cmd_bracket,
    "dbracket": cmd_dbracket,
    "cobracket": cmd_cobracket,
    "bv": cmd_bv,
    "torsion": cmd_torsion,
    "curvtrace": cmd_curvtrace,
    "symbol": cmd_symbol,
    "apply": cmd_apply,
    "ev": cmd_ev,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--quiver", default="one_loop", help="preset (one_loop, loops:N, kronecker, cyclic_two) or JSON file"
    )
    common.add_argument("--parity", type=int, choices=(0, 1), help="star parity (default 1 for bv/torsion/curvtrace)")
    common.add_argument("--format", choices=("text", "json"), default="text")

    p = argparse.ArgumentParser(prog="wheelcalc", description="Wheeled noncommutative calculus on quivers.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("bracket", parents=[common], help="necklace or wheeled bracket of two elements")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--kind", choices=("auto", "necklace", "wheeled"), default="auto")

    s = sub.add_parser("dbracket", parents=[common], help="double bracket of two path combinations")
    s.add_argument("a")
    s.add_argument("b")

    s = sub.add_parser("cobracket", parents=[common], help="necklace cobracket, or lifted cobracket of paths")
    s.add_argument("a")

    s = sub.add_parser("bv", parents=[common], help="BV operator of a connection (trivial by default)")
    s.add_argument("a")
    s.add_argument("--connection", metavar="FILE")

    for name, text in (("torsion", "torsion of a connection"), ("curvtrace", "curvature trace of a connection")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--connection", metavar="FILE")

    s = sub.add_parser("symbol", parents=[common], help="order-N part of an operator symbol")
    s.add_argument("op")
    s.add_argument("n", type=int)

    s = sub.add_parser("apply", parents=[common], help="apply an operator to an element")
    s.add_argument("op")
    s.add_argument("a")

    s = sub.add_parser("ev", parents=[common], help="evaluate on matrices")
    s.add_argument("a")
    s.add_argument("--dim", required=True, help="dimension vector, e.g. v=2,w=3 or a single integer")
    s.add_argument("--point", metavar="FILE", help="JSON map from arrow name to matrix")

    s = sub.add_parser("check", parents=[common], help="run a property suite")
    s.add_argument("suite", choices=sorted(SUITES) + ["all"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-len", type=int, default=4)
    s.add_argument("--max-deg", type=int, default=3)
    s.add_argument("--scale", type=float, default=1.0, help="multiplier for case budgets")
    return p


def run_command(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    parity = args.parity if args.parity is not None else int(args.command in ODD_BY_DEFAULT)
    try:
        q = load_quiver(args.quiver, parity)
        inputs, text, extra, code = COMMANDS[args.command](q, args)
    except ParseError as exc:
        print(f"wheelcalc: parse error at {exc}", file=err)
        return 2
    except (UsageError, EvalError, QuiverError, WheelError, RepError) as exc:
        print(f"wheelcalc: {exc}", file=err)
        return 2
    if args.format == "json":
        doc = {"command": args.command, "quiver": q.to_json(), "inputs": inputs, "output": text, **extra}
        print(json.dumps(doc, indent=2, sort_keys=True), file=out)
    else:
        print(text, file=out)
    return code


def main() -> None:
    sys.exit(run_command())

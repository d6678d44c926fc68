"""Command-line interface: step, run, and check a program file.

Exit codes: 0 for a completed run (a value or an uncaught exception,
both legitimate final programs), 1 for parse errors or failed checks,
2 for stuck programs, 3 when the step limit cuts a trace short.
"""

from __future__ import annotations

import argparse
import os
import sys
import threading

from .ast import Cons, Fun, GlobalRef, IntLit, Nil, BoolLit, RecClosure, StrLit, Tuple, Unit
from .engine import (
    DEFAULT_MAX_STEPS,
    RunResult,
    Stuck,
    StepLimitExceeded,
    UncaughtException,
    Value,
    reference_eval,
    run_program,
)
from .parser import ParseError, parse_program
from .printer import print_expr
from .trace import Trace, emit_json, emit_text, load_json, validate

ENV_MAX_STEPS = "MINISTEP_MAX_STEPS"

EXIT_OK = 0
EXIT_PARSE_ERROR = 1
EXIT_STUCK = 2
EXIT_LIMIT = 3

_STACK_SIZE = 512 * 1024 * 1024


def _default_max_steps() -> int:
    raw = os.environ.get(ENV_MAX_STEPS)
    if raw:
        try:
            value = int(raw)
            if value >= 1:
                return value
        except ValueError:
            pass
        print(f"warning: ignoring bad {ENV_MAX_STEPS}={raw!r}", file=sys.stderr)
    return DEFAULT_MAX_STEPS


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ministep", description="algebraic stepper for a mini-ML")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("input", help="source file (.ml)")
        p.add_argument("--max-steps", type=int, default=None, metavar="N")
        p.add_argument("--output", default=None, metavar="PATH", help="write to PATH instead of stdout")

    p_step = sub.add_parser("step", help="print the reduction trace")
    common(p_step)
    p_step.add_argument("--format", choices=("text", "json"), default="text")

    p_run = sub.add_parser("run", help="evaluate with the reference interpreter")
    common(p_run)

    p_check = sub.add_parser("check", help="validate a trace against the reference interpreter")
    common(p_check)
    return ap


def _write(opts, text: str) -> None:
    if opts.output:
        with open(opts.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _max_steps(opts) -> int:
    n = opts.max_steps if opts.max_steps is not None else _default_max_steps()
    if n < 1:
        raise SystemExit("--max-steps must be >= 1")
    return n


def _result_exit_code(result: RunResult) -> int:
    match result:
        case Value() | UncaughtException():
            return EXIT_OK
        case Stuck():
            return EXIT_STUCK
        case StepLimitExceeded():
            return EXIT_LIMIT
    return EXIT_OK


def cmd_step(opts) -> int:
    try:
        with open(opts.input, encoding="utf-8") as fh:
            src = fh.read()
        program = parse_program(src)
    except OSError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except ParseError as ex:
        print(f"{opts.input}:{ex}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    trace, result = run_program(program, src, max_steps=_max_steps(opts))
    if opts.format == "json":
        _write(opts, emit_json(trace).decode("utf-8"))
    else:
        _write(opts, emit_text(trace))
    if isinstance(result, Stuck):
        print(f"stuck: {result.reason}: {print_expr(result.offending)[0]}", file=sys.stderr)
    return _result_exit_code(result)


def _value_kind(v) -> str:
    match v:
        case IntLit():
            return "int"
        case BoolLit():
            return "bool"
        case StrLit():
            return "string"
        case Unit():
            return "unit"
        case Nil() | Cons():
            return "list"
        case Tuple():
            return "tuple"
        case Fun() | RecClosure() | GlobalRef():
            return "fun"
    return "value"


def cmd_run(opts) -> int:
    try:
        with open(opts.input, encoding="utf-8") as fh:
            src = fh.read()
        program = parse_program(src)
    except OSError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except ParseError as ex:
        print(f"{opts.input}:{ex}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    result, output = reference_eval(program)
    lines = [output] if output else []
    match result:
        case Value(v):
            lines.append(f"- : {_value_kind(v)} = {print_expr(v)[0]}\n")
            code = EXIT_OK
        case UncaughtException(payload):
            lines.append(f"Exception: {print_expr(payload)[0]}\n")
            code = EXIT_OK
        case Stuck(reason, offending):
            print(f"stuck: {reason}: {print_expr(offending)[0]}", file=sys.stderr)
            code = EXIT_STUCK
        case _:
            code = EXIT_OK
    _write(opts, "".join(lines))
    return code


def _load_or_run(opts) -> tuple[Trace, RunResult | None] | None:
    with open(opts.input, "rb") as fh:
        data = fh.read()
    if opts.input.endswith(".json"):
        return load_json(data), None
    src = data.decode("utf-8")
    program = parse_program(src)
    trace, result = run_program(program, src, max_steps=_max_steps(opts))
    return trace, result


def cmd_check(opts) -> int:
    """Exit 0 iff the trace validates and its outcome and output agree
    with the reference interpreter on the same source."""
    try:
        loaded = _load_or_run(opts)
    except OSError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except (ParseError, ValueError) as ex:
        print(f"{opts.input}: {ex}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    trace, result = loaded

    report = validate(trace)
    if not report.ok:
        v = report.violations[0]
        where = "" if v.step is None else f" at step {v.step}"
        print(f"invalid trace: {v.kind}{where}: {v.message}", file=sys.stderr)
        return EXIT_PARSE_ERROR

    if trace.result_kind == "limit":
        print("step limit reached; oracle comparison skipped", file=sys.stderr)
        return EXIT_LIMIT

    ref_result, ref_output = reference_eval(parse_program(trace.source))
    match ref_result:
        case Value(v):
            expected = ("value", print_expr(v)[0])
        case UncaughtException(payload):
            expected = ("exception", f"raise {print_expr(payload)[0]}")
        case Stuck(reason, offending):
            expected = ("stuck", f"{reason}: {print_expr(offending)[0]}")
        case _:
            expected = ("limit", "")
    got = (trace.result_kind, trace.result_text)
    if got != expected:
        print(f"outcome mismatch: stepper {got}, reference {expected}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    step_output = "".join(s.output for s in trace.steps)
    if step_output != ref_output:
        print(f"output mismatch: stepper {step_output!r}, reference {ref_output!r}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    print(f"ok: {len(trace.steps)} steps, outcome {trace.result_kind}")
    return EXIT_OK


def _run_deep(fn):
    """Run `fn` on a thread with a large stack so deeply recursive
    student programs do not hit the interpreter's own limits."""
    box: dict[str, object] = {}

    def target() -> None:
        sys.setrecursionlimit(2_000_000)
        try:
            box["value"] = fn()
        except BaseException as ex:  # re-raised on the caller's thread
            box["error"] = ex

    old = threading.stack_size()
    try:
        threading.stack_size(_STACK_SIZE)
    except (ValueError, RuntimeError):
        pass
    try:
        t = threading.Thread(target=target)
        t.start()
        t.join()
    finally:
        try:
            threading.stack_size(old)
        except (ValueError, RuntimeError):
            pass
    if "error" in box:
        raise box["error"]  # type: ignore[misc]
    return box["value"]


def main(argv: list[str] | None = None) -> int:
    opts = build_arg_parser().parse_args(argv)
    handler = {"step": cmd_step, "run": cmd_run, "check": cmd_check}[opts.command]
    return _run_deep(lambda: handler(opts))


if __name__ == "__main__":
    sys.exit(main())

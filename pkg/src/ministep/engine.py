"""Big-step reference interpreter and the context-tracking stepping evaluator.

Both evaluators follow call-by-value with right-to-left operand order.
The reference interpreter maps expressions straight to values and serves
as the oracle; the stepping evaluator additionally threads an evaluation
context and calls `memo` at every reduction, so the whole program can be
reconstructed and recorded before and after each step.  Object-level
exceptions travel as the meta-level `Raised` signal; a raise with
pending delimited frames first records the context-discarding step.

Reduction rules are tagged for the trace: Beta, GlobalApply, Delta,
IfTrue, IfFalse, Let, LetRec, Match, Seq, TryValue, TryHandle,
RaiseDiscard, Reraise, Print.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .ast import (
    App,
    BinOp,
    BoolLit,
    Cons,
    DefineRec,
    Expr,
    Fun,
    GlobalRef,
    If,
    IntLit,
    Let,
    LetRec,
    Match,
    Nil,
    Pattern,
    Program,
    Raise,
    RecClosure,
    Seq,
    StrLit,
    Try,
    Tuple,
    UnOp,
    Unit,
    Var,
    BUILTIN_GLOBALS,
    is_value,
)
from .context import (
    CAppL,
    CAppR,
    CBinL,
    CBinR,
    CConsL,
    CConsR,
    CIf,
    CLet,
    CMatch,
    CRaise,
    CSeq,
    CTuple,
    CUn,
    Ctxt,
    EMPTY,
    add,
    add_try,
    hole_path,
    plug,
    plug_in_try,
)
from .printer import Annotation, REDEX, REDUCT, print_expr
from .subst import Bindings, match_pattern, subst, subst_many
from .trace import Step, Trace, TraceBuilder

DEFAULT_MAX_STEPS = 10000

DIVISION_BY_ZERO = StrLit("Division_by_zero")
MATCH_FAILURE = StrLit("Match_failure")

_ERR_NOT_FUNCTION = "not a function"
_ERR_UNBOUND = "unbound variable"
_ERR_IF_COND = "if condition must be a boolean"
_ERR_SEQ_UNIT = "left operand of ';' must be ()"
_ERR_UNARY_INT = "unary minus expects an integer"
_ERR_COMPARE_FUN = "cannot compare functions"


class Raised(Exception):
    """Meta-level signal carrying an object-level exception payload."""

    def __init__(self, payload: Expr):
        super().__init__(payload)
        self.payload = payload


class StuckError(Exception):
    """The program reached a redex no rule covers."""

    def __init__(self, reason: str, offending: Expr):
        super().__init__(reason)
        self.reason = reason
        self.offending = offending


class StepLimit(Exception):
    """Raised by memo/apply_start once the step budget is exhausted."""


@dataclass(frozen=True)
class Builtin:
    name: str


@dataclass(frozen=True)
class TopRec:
    name: str
    param: Pattern
    fbody: Expr


@dataclass(frozen=True)
class TopValue:
    value: Expr


GlobalDef = Union[Builtin, TopRec, TopValue]
Globals = dict[str, GlobalDef]


class RunResult:
    __slots__ = ()


@dataclass(frozen=True)
class Value(RunResult):
    value: Expr


@dataclass(frozen=True)
class UncaughtException(RunResult):
    payload: Expr


@dataclass(frozen=True)
class Stuck(RunResult):
    reason: str
    offending: Expr


@dataclass(frozen=True)
class StepLimitExceeded(RunResult):
    pass


@dataclass
class EngineState:
    """Mutable state of one stepping run."""

    globals: Globals
    sink: TraceBuilder | None = None
    max_steps: int = DEFAULT_MAX_STEPS
    step_counter: int = 0
    app_counter: int = 0
    output_log: str = ""
    eval_hook: Callable[[Expr, Ctxt], None] | None = None

    def is_global_fun(self, name: str) -> bool:
        return _resolves_to_function(self.globals, name)


def _chase(g: Globals, name: str) -> GlobalDef | None:
    d = g.get(name)
    while isinstance(d, TopValue) and isinstance(d.value, GlobalRef):
        d = g.get(d.value.name)
    return d


def _resolves_to_function(g: Globals, name: str) -> bool:
    d = _chase(g, name)
    if isinstance(d, (Builtin, TopRec)):
        return True
    return isinstance(d, TopValue) and isinstance(d.value, (Fun, RecClosure))


def _structural_eq(a: Expr, b: Expr) -> bool:
    if isinstance(a, (Fun, RecClosure, GlobalRef)) or isinstance(b, (Fun, RecClosure, GlobalRef)):
        raise StuckError(_ERR_COMPARE_FUN, BinOp("=", a, b))
    match a, b:
        case Cons(h1, t1), Cons(h2, t2):
            return _structural_eq(h1, h2) and _structural_eq(t1, t2)
        case Tuple(xs), Tuple(ys):
            return len(xs) == len(ys) and all(_structural_eq(x, y) for x, y in zip(xs, ys))
        case _:
            return a == b


def _binop_result(op: str, v1: Expr, v2: Expr) -> Expr:
    """Value (or `raise` expression) one primitive reduction produces.

    Raises StuckError when the operand kinds do not fit the operator.
    """
    redex = BinOp(op, v1, v2)
    if op in ("+", "-", "*", "/"):
        if isinstance(v1, IntLit) and isinstance(v2, IntLit):
            if op == "+":
                return IntLit(v1.value + v2.value)
            if op == "-":
                return IntLit(v1.value - v2.value)
            if op == "*":
                return IntLit(v1.value * v2.value)
            if v2.value == 0:
                return Raise(DIVISION_BY_ZERO)
            q = abs(v1.value) // abs(v2.value)  # OCaml division truncates toward zero
            return IntLit(q if (v1.value >= 0) == (v2.value >= 0) else -q)
        raise StuckError(f"'{op}' expects integers", redex)
    if op == "^":
        if isinstance(v1, StrLit) and isinstance(v2, StrLit):
            return StrLit(v1.value + v2.value)
        raise StuckError("'^' expects strings", redex)
    if op in ("&&", "||"):
        if isinstance(v1, BoolLit) and isinstance(v2, BoolLit):
            return BoolLit(v1.value and v2.value if op == "&&" else v1.value or v2.value)
        raise StuckError(f"'{op}' expects booleans", redex)
    if op in ("=", "<>"):
        eq = _structural_eq(v1, v2)
        return BoolLit(eq if op == "=" else not eq)
    if op in ("<", "<=", ">", ">="):
        if isinstance(v1, IntLit) and isinstance(v2, IntLit):
            a, b = v1.value, v2.value
        elif isinstance(v1, StrLit) and isinstance(v2, StrLit):
            a, b = v1.value, v2.value
        else:
            raise StuckError(f"'{op}' expects two integers or two strings", redex)
        return BoolLit({"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op])
    raise StuckError(f"unknown operator '{op}'", redex)


# ---------------------------------------------------------------------------
# Reference big-step interpreter (the oracle; no contexts, no trace)
# ---------------------------------------------------------------------------


def _ref_eval(e: Expr, g: Globals, out: list[str]) -> Expr:
    match e:
        case IntLit() | BoolLit() | StrLit() | Unit() | Fun() | RecClosure() | Nil():
            return e
        case Var(name):
            raise StuckError(f"{_ERR_UNBOUND}: {name}", e)
        case GlobalRef(name):
            d = _chase(g, name)
            if d is None:
                raise StuckError(f"{_ERR_UNBOUND}: {name}", e)
            if isinstance(d, TopValue) and not isinstance(d.value, (Fun, RecClosure)):
                return d.value
            return e
        case App(fn, arg):
            v2 = _ref_eval(arg, g, out)
            v1 = _ref_eval(fn, g, out)
            return _ref_apply(v1, v2, g, out)
        case BinOp(op, left, right):
            v2 = _ref_eval(right, g, out)
            v1 = _ref_eval(left, g, out)
            r = _binop_result(op, v1, v2)
            if isinstance(r, Raise):
                raise Raised(r.payload)
            return r
        case UnOp(_, operand):
            v = _ref_eval(operand, g, out)
            if not isinstance(v, IntLit):
                raise StuckError(_ERR_UNARY_INT, UnOp("-", v))
            return IntLit(-v.value)
        case If(cond, then_branch, else_branch):
            v = _ref_eval(cond, g, out)
            if not isinstance(v, BoolLit):
                raise StuckError(_ERR_IF_COND, If(v, then_branch, else_branch))
            return _ref_eval(then_branch if v.value else else_branch, g, out)
        case Let(binding, bound, body):
            v = _ref_eval(bound, g, out)
            bnd = match_pattern(binding, v)
            if bnd is None:
                raise Raised(MATCH_FAILURE)
            return _ref_eval(subst_many(body, bnd), g, out)
        case LetRec(name, param, fbody, body):
            return _ref_eval(subst(body, name, RecClosure(name, param, fbody)), g, out)
        case Cons(head, tail):
            vt = _ref_eval(tail, g, out)
            vh = _ref_eval(head, g, out)
            return Cons(vh, vt)
        case Tuple(items):
            vals = [None] * len(items)
            for i in range(len(items) - 1, -1, -1):
                vals[i] = _ref_eval(items[i], g, out)
            return Tuple(tuple(vals))
        case Match(scrutinee, clauses):
            v = _ref_eval(scrutinee, g, out)
            for pat, rhs in clauses:
                bnd = match_pattern(pat, v)
                if bnd is not None:
                    return _ref_eval(subst_many(rhs, bnd), g, out)
            raise Raised(MATCH_FAILURE)
        case Try(tryee, clauses):
            try:
                return _ref_eval(tryee, g, out)
            except Raised as ex:
                for pat, rhs in clauses:
                    bnd = match_pattern(pat, ex.payload)
                    if bnd is not None:
                        return _ref_eval(subst_many(rhs, bnd), g, out)
                raise
        case Raise(payload):
            v = _ref_eval(payload, g, out)
            raise Raised(v)
        case Seq(first, second):
            v = _ref_eval(first, g, out)
            if not isinstance(v, Unit):
                raise StuckError(_ERR_SEQ_UNIT, Seq(v, second))
            return _ref_eval(second, g, out)
        case _:
            raise StuckError(f"cannot evaluate {type(e).__name__}", e)


def _ref_apply(v1: Expr, v2: Expr, g: Globals, out: list[str]) -> Expr:
    match v1:
        case Fun(param, body):
            bnd = match_pattern(param, v2)
            if bnd is None:
                raise Raised(MATCH_FAILURE)
            return _ref_eval(subst_many(body, bnd), g, out)
        case RecClosure(name, param, fbody):
            bnd = match_pattern(param, v2)
            if bnd is None:
                raise Raised(MATCH_FAILURE)
            return _ref_eval(subst_many(fbody, {name: v1, **bnd}), g, out)
        case GlobalRef(name):
            d = _chase(g, name)
            match d:
                case Builtin(bname):
                    out.append(_builtin_output(bname, v1, v2))
                    return Unit()
                case TopRec(fname, param, fbody):
                    bnd = match_pattern(param, v2)
                    if bnd is None:
                        raise Raised(MATCH_FAILURE)
                    return _ref_eval(subst_many(fbody, bnd), g, out)
                case TopValue(value) if isinstance(value, (Fun, RecClosure)):
                    return _ref_apply(value, v2, g, out)
                case _:
                    raise StuckError(_ERR_NOT_FUNCTION, App(v1, v2))
        case _:
            raise StuckError(_ERR_NOT_FUNCTION, App(v1, v2))


def _builtin_output(bname: str, fn: Expr, arg: Expr) -> str:
    if bname == "print_string":
        if not isinstance(arg, StrLit):
            raise StuckError("print_string expects a string", App(fn, arg))
        return arg.value
    if bname == "print_int":
        if not isinstance(arg, IntLit):
            raise StuckError("print_int expects an integer", App(fn, arg))
        return str(arg.value)
    raise StuckError(f"{_ERR_UNBOUND}: {bname}", fn)


def make_globals(program: Program, out: list[str]) -> Globals:
    """Resolve top-level definitions in order.

    Non-value right-hand sides are evaluated with the reference
    interpreter; definition bodies of functions stay as written so
    application steps can display them.
    """
    g: Globals = {name: Builtin(name) for name in BUILTIN_GLOBALS}
    for d in program.defs:
        if isinstance(d, DefineRec):
            g[d.name] = TopRec(d.name, d.param, d.fbody)
        else:
            e = d.expr
            if not is_value(e, lambda n: _resolves_to_function(g, n)):
                e = _ref_eval(e, g, out)
            g[d.name] = TopValue(e)
    return g


def reference_eval(program: Program) -> tuple[RunResult, str]:
    """Evaluate a whole program big-step; returns outcome and printed output."""
    out: list[str] = []
    try:
        g = make_globals(program, out)
        last: Expr = Unit()
        for e in program.main:
            last = _ref_eval(e, g, out)
        return Value(last), "".join(out)
    except Raised as ex:
        return UncaughtException(ex.payload), "".join(out)
    except StuckError as ex:
        return Stuck(ex.reason, ex.offending), "".join(out)
    except RecursionError:
        return Stuck("interpreter recursion limit exceeded", Unit()), "".join(out)


# ---------------------------------------------------------------------------
# Stepping evaluator
# ---------------------------------------------------------------------------


def memo(redex: Expr, reduct: Expr, c: Ctxt, rule: str, st: EngineState, output: str = "") -> None:
    """Record one reduction: the whole program before and after, with the
    redex/reduct spans, then advance the step counter."""
    if st.step_counter >= st.max_steps:
        raise StepLimit()
    path = hole_path(c)
    pre_text, pre_span = print_expr(plug(redex, c), Annotation(REDEX, path))
    post_text, post_span = print_expr(plug(reduct, c), Annotation(REDUCT, path))
    step = Step(
        n=st.step_counter,
        pre_text=pre_text,
        pre_span=(pre_span.start, pre_span.end),
        post_text=post_text,
        post_span=(post_span.start, post_span.end),
        rule=rule,
        output=output,
    )
    st.step_counter += 1
    st.output_log += output
    if st.sink is not None:
        st.sink.on_step(step)


def apply_start(st: EngineState) -> int:
    """Open a skip region; the id is the step at which the application
    was entered."""
    if st.step_counter >= st.max_steps:
        raise StepLimit()
    app_id = st.step_counter
    st.app_counter += 1
    if st.sink is not None:
        st.sink.on_apply_start(app_id)
    return app_id


def apply_end(st: EngineState, app_id: int) -> None:
    if st.sink is not None:
        st.sink.on_apply_end(app_id)


def step_eval(e: Expr, c: Ctxt, st: EngineState) -> Expr:
    """Evaluate `e` in context `c`, emitting one memo per reduction.

    Returns the value of `e`; object-level exceptions propagate as
    `Raised` after the discard step has been recorded.
    """
    if st.eval_hook is not None:
        st.eval_hook(e, c)
    match e:
        case IntLit() | BoolLit() | StrLit() | Unit() | Fun() | RecClosure() | Nil():
            return e
        case Var(name):
            raise StuckError(f"{_ERR_UNBOUND}: {name}", e)
        case GlobalRef(name):
            d = _chase(st.globals, name)
            if d is None:
                raise StuckError(f"{_ERR_UNBOUND}: {name}", e)
            if isinstance(d, TopValue) and not isinstance(d.value, (Fun, RecClosure)):
                memo(e, d.value, c, "Delta", st)
                return d.value
            return e
        case App(fn, arg):
            v2 = step_eval(arg, add(c, CAppR(fn)), st)
            v1 = step_eval(fn, add(c, CAppL(v2)), st)
            return _apply(v1, v2, c, st)
        case BinOp(op, left, right):
            v2 = step_eval(right, add(c, CBinR(op, left)), st)
            v1 = step_eval(left, add(c, CBinL(op, v2)), st)
            result = _binop_result(op, v1, v2)
            memo(BinOp(op, v1, v2), result, c, "Delta", st)
            return step_eval(result, c, st)
        case UnOp(op, operand):
            v = step_eval(operand, add(c, CUn(op)), st)
            if not isinstance(v, IntLit):
                raise StuckError(_ERR_UNARY_INT, UnOp(op, v))
            result = IntLit(-v.value)
            memo(UnOp(op, v), result, c, "Delta", st)
            return result
        case If(cond, then_branch, else_branch):
            v = step_eval(cond, add(c, CIf(then_branch, else_branch)), st)
            if not isinstance(v, BoolLit):
                raise StuckError(_ERR_IF_COND, If(v, then_branch, else_branch))
            taken = then_branch if v.value else else_branch
            memo(If(v, then_branch, else_branch), taken, c, "IfTrue" if v.value else "IfFalse", st)
            return step_eval(taken, c, st)
        case Let(binding, bound, body):
            v = step_eval(bound, add(c, CLet(binding, body)), st)
            redex = Let(binding, v, body)
            bnd = match_pattern(binding, v)
            if bnd is None:
                reduct: Expr = Raise(MATCH_FAILURE)
            else:
                reduct = subst_many(body, bnd)
            memo(redex, reduct, c, "Let", st)
            return step_eval(reduct, c, st)
        case LetRec(name, param, fbody, body):
            reduct = subst(body, name, RecClosure(name, param, fbody))
            memo(e, reduct, c, "LetRec", st)
            return step_eval(reduct, c, st)
        case Cons(head, tail):
            if is_value(e, st.is_global_fun):
                return e
            vt = step_eval(tail, add(c, CConsR(head)), st)
            vh = step_eval(head, add(c, CConsL(vt)), st)
            return Cons(vh, vt)
        case Tuple(items):
            if is_value(e, st.is_global_fun):
                return e
            vals: list[Expr] = []
            for i in range(len(items) - 1, -1, -1):
                frame = CTuple(tuple(items[:i]), tuple(vals))
                vals.insert(0, step_eval(items[i], add(c, frame), st))
            return Tuple(tuple(vals))
        case Match(scrutinee, clauses):
            v = step_eval(scrutinee, add(c, CMatch(clauses)), st)
            redex = Match(v, clauses)
            for pat, rhs in clauses:
                bnd = match_pattern(pat, v)
                if bnd is not None:
                    reduct = subst_many(rhs, bnd)
                    memo(redex, reduct, c, "Match", st)
                    return step_eval(reduct, c, st)
            reduct = Raise(MATCH_FAILURE)
            memo(redex, reduct, c, "Match", st)
            return step_eval(reduct, c, st)
        case Try(tryee, clauses):
            try:
                v1 = step_eval(tryee, add_try(c, clauses), st)
            except Raised as ex:
                v = ex.payload
                for pat, rhs in clauses:
                    bnd = match_pattern(pat, v)
                    if bnd is not None:
                        reduct = subst_many(rhs, bnd)
                        memo(Try(Raise(v), clauses), reduct, c, "TryHandle", st)
                        return step_eval(reduct, c, st)
                # No clause matches: re-raise as its own step, then let the
                # pending frames be discarded exactly as a fresh raise would.
                memo(Try(Raise(v), clauses), Raise(v), c, "Reraise", st)
                _discard_frames(v, c, st)
                raise
            memo(Try(v1, clauses), v1, c, "TryValue", st)
            return v1
        case Raise(payload):
            v = step_eval(payload, add(c, CRaise()), st)
            _discard_frames(v, c, st)
            raise Raised(v)
        case Seq(first, second):
            v = step_eval(first, add(c, CSeq(second)), st)
            if not isinstance(v, Unit):
                raise StuckError(_ERR_SEQ_UNIT, Seq(v, second))
            memo(Seq(v, second), second, c, "Seq", st)
            return step_eval(second, c, st)
        case _:
            raise StuckError(f"cannot evaluate {type(e).__name__}", e)


def _discard_frames(v: Expr, c: Ctxt, st: EngineState) -> None:
    # `... (raise v) ... ~> raise v`, recorded only when there is a
    # delimited context to discard; otherwise the raise is already the
    # whole tryee and no program change would be visible.
    if c.frames:
        memo(plug_in_try(Raise(v), c.frames), Raise(v), Ctxt((), c.meta), "RaiseDiscard", st)


def _apply(v1: Expr, v2: Expr, c: Ctxt, st: EngineState) -> Expr:
    match v1:
        case Fun(param, body):
            return _beta(v1, v2, param, body, None, "Beta", c, st)
        case RecClosure(name, param, fbody):
            return _beta(v1, v2, param, fbody, (name, v1), "Beta", c, st)
        case GlobalRef(name):
            return apply_global(name, v1, v2, c, st)
        case _:
            raise StuckError(_ERR_NOT_FUNCTION, App(v1, v2))


def apply_global(name: str, ref: Expr, v: Expr, c: Ctxt, st: EngineState) -> Expr:
    """Unfold a call to a top-level definition; the redex keeps the
    symbolic name so the trace shows e.g. `fac 4`."""
    d = _chase(st.globals, name)
    match d:
        case Builtin(bname):
            text = _builtin_output(bname, ref, v)
            memo(App(ref, v), Unit(), c, "Print", st, output=text)
            return Unit()
        case TopRec(_, param, fbody):
            return _beta(ref, v, param, fbody, None, "GlobalApply", c, st)
        case TopValue(value) if isinstance(value, Fun):
            return _beta(ref, v, value.param, value.body, None, "GlobalApply", c, st)
        case TopValue(value) if isinstance(value, RecClosure):
            return _beta(ref, v, value.param, value.fbody, (value.name, value), "GlobalApply", c, st)
        case _:
            raise StuckError(_ERR_NOT_FUNCTION, App(ref, v))


def _beta(
    fn_display: Expr,
    v: Expr,
    param: Pattern,
    body: Expr,
    self_binding: tuple[str, Expr] | None,
    rule: str,
    c: Ctxt,
    st: EngineState,
) -> Expr:
    redex = App(fn_display, v)
    bnd = match_pattern(param, v)
    if bnd is None:
        reduct: Expr = Raise(MATCH_FAILURE)
        memo(redex, reduct, c, rule, st)
        return step_eval(reduct, c, st)
    bindings: Bindings = dict((self_binding,)) if self_binding else {}
    bindings.update(bnd)
    reduct = subst_many(body, bindings)
    app_id = apply_start(st)
    try:
        memo(redex, reduct, c, rule, st)
        return step_eval(reduct, c, st)
    finally:
        apply_end(st, app_id)


def run_program(
    program: Program,
    source: str = "",
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
    eval_hook: Callable[[Expr, Ctxt], None] | None = None,
) -> tuple[Trace, RunResult]:
    """Step-evaluate every main expression of `program`.

    The trace ends with the final program: the last value, or `raise v`
    for an exception that escaped.  A step-limit overrun truncates the
    trace but leaves it well formed (regions are closed on unwind).
    """
    builder = TraceBuilder()
    st = EngineState(globals={}, sink=builder, max_steps=max_steps, eval_hook=eval_hook)
    out: list[str] = []
    result: RunResult | None = None
    final_text = ""
    try:
        st.globals = make_globals(program, out)
    except Raised as ex:
        result = UncaughtException(ex.payload)
        final_text = print_expr(Raise(ex.payload))[0]
    except StuckError as ex:
        result = Stuck(ex.reason, ex.offending)
    st.output_log = "".join(out)

    if result is None:
        for e in program.main:
            builder.mark_segment(st.step_counter)
            try:
                value = step_eval(e, EMPTY, st)
                final_text = print_expr(value)[0]
                result = Value(value)
            except Raised as ex:
                final_text = print_expr(Raise(ex.payload))[0]
                result = UncaughtException(ex.payload)
                break
            except StuckError as ex:
                result = Stuck(ex.reason, ex.offending)
                break
            except StepLimit:
                result = StepLimitExceeded()
                break
            except RecursionError:
                result = Stuck("interpreter recursion limit exceeded", e)
                break
    if result is None:
        result = Value(Unit())

    kind, text = summarize(result, final_text, builder)
    trace = builder.finish(source=source, result_kind=kind, result_text=text)
    return trace, result


def summarize(result: RunResult, final_text: str, builder: TraceBuilder) -> tuple[str, str]:
    match result:
        case Value():
            return "value", final_text
        case UncaughtException():
            return "exception", final_text
        case Stuck(reason, offending):
            return "stuck", f"{reason}: {print_expr(offending)[0]}"
        case StepLimitExceeded():
            return "limit", builder.last_post_text()
        case _:
            raise AssertionError(f"unknown result {result!r}")


def run_source(src: str, **kwargs) -> tuple[Trace, RunResult]:
    """Parse and step-evaluate a source program."""
    from .parser import parse_program

    return run_program(parse_program(src), src, **kwargs)

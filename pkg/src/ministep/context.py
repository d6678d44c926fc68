"""Two-level evaluation contexts and program reconstruction.

A context is a pair: the list of frames between the current expression
and the nearest enclosing exception handler (innermost frame first), and
a meta chain of the handlers themselves, each capturing its own outer
context.  Keeping handler boundaries out of the frame list is what lets
the engine discard exactly the delimited part when an exception fires,
and makes handler lookup O(1).
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    App,
    BinOp,
    Clause,
    Cons,
    Expr,
    If,
    Let,
    Match,
    Pattern,
    PVar,
    Raise,
    Seq,
    Try,
    Tuple,
    UnOp,
)


class Frame:
    """One delimited context layer; the hole marks the active position."""

    __slots__ = ()


@dataclass(frozen=True)
class CAppR(Frame):
    """e [.] — evaluating the argument of an application."""

    fn_expr: Expr


@dataclass(frozen=True)
class CAppL(Frame):
    """[.] v — evaluating the function, argument already a value."""

    arg_value: Expr


@dataclass(frozen=True)
class CRaise(Frame):
    """raise [.]"""


@dataclass(frozen=True)
class CBinR(Frame):
    """e op [.]"""

    op: str
    left_expr: Expr


@dataclass(frozen=True)
class CBinL(Frame):
    """[.] op v"""

    op: str
    right_value: Expr


@dataclass(frozen=True)
class CUn(Frame):
    op: str


@dataclass(frozen=True)
class CIf(Frame):
    then_expr: Expr
    else_expr: Expr


@dataclass(frozen=True)
class CLet(Frame):
    binding: Pattern
    body: Expr


@dataclass(frozen=True)
class CConsR(Frame):
    """e :: [.]"""

    head_expr: Expr


@dataclass(frozen=True)
class CConsL(Frame):
    """[.] :: v"""

    tail_value: Expr


@dataclass(frozen=True)
class CTuple(Frame):
    """Tuple position: unevaluated items left of the hole, values right."""

    left_exprs: tuple[Expr, ...]
    right_values: tuple[Expr, ...]


@dataclass(frozen=True)
class CMatch(Frame):
    clauses: tuple[Clause, ...]


@dataclass(frozen=True)
class CSeq(Frame):
    """[.]; e"""

    second: Expr


class MetaCtxt:
    __slots__ = ()


@dataclass(frozen=True)
class CHole(MetaCtxt):
    pass


@dataclass(frozen=True)
class CTry(MetaCtxt):
    clauses: tuple[Clause, ...]
    outer: "Ctxt"


@dataclass(frozen=True)
class Ctxt:
    frames: tuple[Frame, ...] = ()
    meta: MetaCtxt = CHole()


EMPTY = Ctxt()


def add(c: Ctxt, f: Frame) -> Ctxt:
    """Push one frame; the meta chain is untouched."""
    return Ctxt((f,) + c.frames, c.meta)


def add_try(c: Ctxt, clauses: tuple[Clause, ...]) -> Ctxt:
    """Enter a handler: fresh delimited frame list, old context captured."""
    return Ctxt((), CTry(clauses, c))


def _wrap(f: Frame, e: Expr) -> Expr:
    match f:
        case CAppR(fn_expr):
            return App(fn_expr, e)
        case CAppL(arg_value):
            return App(e, arg_value)
        case CRaise():
            return Raise(e)
        case CBinR(op, left_expr):
            return BinOp(op, left_expr, e)
        case CBinL(op, right_value):
            return BinOp(op, e, right_value)
        case CUn(op):
            return UnOp(op, e)
        case CIf(then_expr, else_expr):
            return If(e, then_expr, else_expr)
        case CLet(binding, body):
            return Let(binding, e, body)
        case CConsR(head_expr):
            return Cons(head_expr, e)
        case CConsL(tail_value):
            return Cons(e, tail_value)
        case CTuple(left_exprs, right_values):
            return Tuple(left_exprs + (e,) + right_values)
        case CMatch(clauses):
            return Match(e, clauses)
        case CSeq(second):
            return Seq(e, second)
        case _:
            raise AssertionError(f"unknown frame {f!r}")


def plug_in_try(e: Expr, frames: tuple[Frame, ...]) -> Expr:
    """Rebuild the tryee: wrap `e` with the delimited frames, innermost first."""
    for f in frames:
        e = _wrap(f, e)
    return e


def plug(e: Expr, c: Ctxt) -> Expr:
    """Rebuild the whole program from the current expression and context."""
    tryee = plug_in_try(e, c.frames)
    match c.meta:
        case CHole():
            return tryee
        case CTry(clauses, outer):
            return plug(Try(tryee, clauses), outer)
        case _:
            raise AssertionError(f"unknown meta context {c.meta!r}")


# Child index of the hole inside the expression each frame rebuilds.
# Indices follow the printer's child numbering (see printer.py).
_FRAME_HOLE_CHILD = {
    CAppR: 1,
    CAppL: 0,
    CRaise: 0,
    CBinR: 1,
    CBinL: 0,
    CUn: 0,
    CIf: 0,
    CLet: 0,
    CConsR: 1,
    CConsL: 0,
    CMatch: 0,
    CSeq: 0,
}


def hole_path(c: Ctxt) -> tuple[int, ...]:
    """Path of child indices from the root of plug(e, c) down to `e`."""
    match c.meta:
        case CHole():
            base: tuple[int, ...] = ()
        case CTry(_, outer):
            base = hole_path(outer) + (0,)  # tryee is child 0 of Try
        case _:
            raise AssertionError(f"unknown meta context {c.meta!r}")
    edges = []
    for f in reversed(c.frames):
        if isinstance(f, CTuple):
            edges.append(len(f.left_exprs))
        else:
            edges.append(_FRAME_HOLE_CHILD[type(f)])
    return base + tuple(edges)


def describe_frame(f: Frame) -> str:
    """Render one frame in the `e op [.]` notation used by the engine demos."""
    from .printer import print_expr

    def p(e: Expr) -> str:
        return print_expr(e)[0]

    match f:
        case CAppR(fn_expr):
            return f"{p(fn_expr)} [.]"
        case CAppL(arg_value):
            return f"[.] {p(arg_value)}"
        case CRaise():
            return "raise [.]"
        case CBinR(op, left_expr):
            return f"{p(left_expr)} {op} [.]"
        case CBinL(op, right_value):
            return f"[.] {op} {p(right_value)}"
        case CUn(op):
            return f"{op} [.]"
        case CIf(then_expr, else_expr):
            return f"if [.] then {p(then_expr)} else {p(else_expr)}"
        case CLet(binding, body):
            from .printer import print_pattern

            return f"let {print_pattern(binding)} = [.] in {p(body)}"
        case CConsR(head_expr):
            return f"{p(head_expr)} :: [.]"
        case CConsL(tail_value):
            return f"[.] :: {p(tail_value)}"
        case CTuple(left_exprs, right_values):
            items = [p(e) for e in left_exprs] + ["[.]"] + [p(v) for v in right_values]
            return "(" + ", ".join(items) + ")"
        case CMatch(clauses):
            return "match [.] with " + _describe_clauses(clauses)
        case CSeq(second):
            return f"[.]; {p(second)}"
        case _:
            raise AssertionError(f"unknown frame {f!r}")


def _describe_clauses(clauses: tuple[Clause, ...]) -> str:
    from .printer import print_expr, print_pattern

    return " | ".join(f"{print_pattern(p)} -> {print_expr(rhs)[0]}" for p, rhs in clauses)


def describe(c: Ctxt) -> str:
    """Render a context in the `([frames], CTry (...))` notation."""
    from .printer import print_expr

    frames = "[" + "; ".join(describe_frame(f) for f in c.frames) + "]"
    match c.meta:
        case CHole():
            meta = "CHole"
        case CTry(clauses, outer):
            if len(clauses) == 1 and isinstance(clauses[0][0], PVar):
                head = f'"{clauses[0][0].name}", {print_expr(clauses[0][1])[0]}'
            else:
                head = "<" + _describe_clauses(clauses) + ">"
            meta = f"CTry ({head}, {describe(outer)})"
    return f"({frames}, {meta})"

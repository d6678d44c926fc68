"""Abstract syntax for the stepped mini-ML object language.

Expressions and patterns are immutable dataclasses compared structurally.
`RecClosure` is the value form a local `let rec` reduces to; `GlobalRef`
keeps references to top-level definitions symbolic so traces display
`fac 4` rather than an inlined function body.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union


OPERATORS = frozenset({"+", "-", "*", "/", "=", "<>", "<", "<=", ">", ">=", "&&", "||", "^"})

# Names usable as top-level references without a definition in the source.
BUILTIN_GLOBALS = frozenset({"print_string", "print_int"})


class Expr:
    """Base class for expression nodes."""

    __slots__ = ()


class Pattern:
    """Base class for pattern nodes."""

    __slots__ = ()


Clause = tuple[Pattern, Expr]


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class StrLit(Expr):
    value: str


@dataclass(frozen=True)
class Unit(Expr):
    pass


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Fun(Expr):
    param: Pattern
    body: Expr


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class UnOp(Expr):
    op: str
    operand: Expr


@dataclass(frozen=True)
class If(Expr):
    cond: Expr
    then_branch: Expr
    else_branch: Expr


@dataclass(frozen=True)
class Let(Expr):
    binding: Pattern
    bound: Expr
    body: Expr


@dataclass(frozen=True)
class LetRec(Expr):
    name: str
    param: Pattern
    fbody: Expr
    body: Expr


@dataclass(frozen=True)
class Nil(Expr):
    pass


@dataclass(frozen=True)
class Cons(Expr):
    head: Expr
    tail: Expr


@dataclass(frozen=True)
class Tuple(Expr):
    items: tuple[Expr, ...]

    def __post_init__(self) -> None:
        if len(self.items) < 2:
            raise ValueError("tuple arity must be >= 2")


@dataclass(frozen=True)
class Match(Expr):
    scrutinee: Expr
    clauses: tuple[Clause, ...]

    def __post_init__(self) -> None:
        if not self.clauses:
            raise ValueError("match requires at least one clause")


@dataclass(frozen=True)
class Try(Expr):
    tryee: Expr
    clauses: tuple[Clause, ...]

    def __post_init__(self) -> None:
        if not self.clauses:
            raise ValueError("try requires at least one clause")


@dataclass(frozen=True)
class Raise(Expr):
    payload: Expr


@dataclass(frozen=True)
class Seq(Expr):
    first: Expr
    second: Expr


@dataclass(frozen=True)
class GlobalRef(Expr):
    name: str


@dataclass(frozen=True)
class RecClosure(Expr):
    name: str
    param: Pattern
    fbody: Expr


@dataclass(frozen=True)
class PVar(Pattern):
    name: str


@dataclass(frozen=True)
class PWild(Pattern):
    pass


@dataclass(frozen=True)
class PInt(Pattern):
    value: int


@dataclass(frozen=True)
class PBool(Pattern):
    value: bool


@dataclass(frozen=True)
class PStr(Pattern):
    value: str


@dataclass(frozen=True)
class PUnit(Pattern):
    pass


@dataclass(frozen=True)
class PNil(Pattern):
    pass


@dataclass(frozen=True)
class PCons(Pattern):
    head: Pattern
    tail: Pattern


@dataclass(frozen=True)
class PTuple(Pattern):
    items: tuple[Pattern, ...]

    def __post_init__(self) -> None:
        if len(self.items) < 2:
            raise ValueError("tuple pattern arity must be >= 2")


@dataclass(frozen=True)
class Define:
    name: str
    expr: Expr


@dataclass(frozen=True)
class DefineRec:
    name: str
    param: Pattern
    fbody: Expr


TopDef = Union[Define, DefineRec]


@dataclass(frozen=True)
class Program:
    defs: tuple[TopDef, ...] = ()
    main: tuple[Expr, ...] = ()


def pattern_vars(p: Pattern) -> set[str]:
    """Variable names bound by a pattern."""
    match p:
        case PVar(name):
            return {name}
        case PCons(head, tail):
            return pattern_vars(head) | pattern_vars(tail)
        case PTuple(items):
            out: set[str] = set()
            for item in items:
                out |= pattern_vars(item)
            return out
        case _:
            return set()


def is_value(e: Expr, is_global_fun: Callable[[str], bool] | None = None) -> bool:
    """True iff `e` is fully reduced.

    Functions, literals, and structured data made of values are values.
    A `GlobalRef` counts as a value only when it resolves to a function;
    without an `is_global_fun` resolver every `GlobalRef` is assumed to
    (references to non-function globals are reduced away by the engine).
    """
    match e:
        case IntLit() | BoolLit() | StrLit() | Unit() | Fun() | RecClosure() | Nil():
            return True
        case GlobalRef(name):
            return True if is_global_fun is None else is_global_fun(name)
        case Cons(head, tail):
            return is_value(head, is_global_fun) and is_value(tail, is_global_fun)
        case Tuple(items):
            return all(is_value(item, is_global_fun) for item in items)
        case _:
            return False


def free_vars(e: Expr) -> set[str]:
    """Free variable names of `e`; `GlobalRef` names are excluded."""
    match e:
        case Var(name):
            return {name}
        case Fun(param, body):
            return free_vars(body) - pattern_vars(param)
        case App(fn, arg):
            return free_vars(fn) | free_vars(arg)
        case BinOp(_, left, right):
            return free_vars(left) | free_vars(right)
        case UnOp(_, operand):
            return free_vars(operand)
        case If(cond, then_branch, else_branch):
            return free_vars(cond) | free_vars(then_branch) | free_vars(else_branch)
        case Let(binding, bound, body):
            return free_vars(bound) | (free_vars(body) - pattern_vars(binding))
        case LetRec(name, param, fbody, body):
            in_fbody = free_vars(fbody) - pattern_vars(param) - {name}
            return in_fbody | (free_vars(body) - {name})
        case Cons(head, tail):
            return free_vars(head) | free_vars(tail)
        case Tuple(items):
            out: set[str] = set()
            for item in items:
                out |= free_vars(item)
            return out
        case Match(scrutinee, clauses):
            out = free_vars(scrutinee)
            for pat, rhs in clauses:
                out |= free_vars(rhs) - pattern_vars(pat)
            return out
        case Try(tryee, clauses):
            out = free_vars(tryee)
            for pat, rhs in clauses:
                out |= free_vars(rhs) - pattern_vars(pat)
            return out
        case Raise(payload):
            return free_vars(payload)
        case Seq(first, second):
            return free_vars(first) | free_vars(second)
        case RecClosure(name, param, fbody):
            return free_vars(fbody) - pattern_vars(param) - {name}
        case _:
            return set()

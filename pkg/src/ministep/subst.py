"""Substitution of closed values and first-order pattern matching.

Evaluation of a closed program only ever substitutes closed values, so no
alpha-renaming is needed and binders simply shadow.  The closedness
precondition is asserted rather than handled.
"""

from __future__ import annotations

from .ast import (
    App,
    BinOp,
    BoolLit,
    Cons,
    Expr,
    Fun,
    If,
    IntLit,
    Let,
    LetRec,
    Match,
    Nil,
    Pattern,
    PBool,
    PCons,
    PInt,
    PNil,
    PStr,
    PTuple,
    PUnit,
    PVar,
    PWild,
    Raise,
    RecClosure,
    Seq,
    StrLit,
    Try,
    Tuple,
    UnOp,
    Unit,
    Var,
    free_vars,
    is_value,
    pattern_vars,
)

Bindings = dict[str, Expr]


def subst(e: Expr, x: str, v: Expr) -> Expr:
    """Replace every free occurrence of `x` in `e` by the closed value `v`."""
    return subst_many(e, {x: v})


def subst_many(e: Expr, b: Bindings) -> Expr:
    """Simultaneous substitution of several closed values.

    Equivalent to any sequential order because the values are closed.
    """
    for v in b.values():
        assert is_value(v) and not free_vars(v), "substituted expressions must be closed values"
    if not b:
        return e
    return _subst(e, b)


def _drop(b: Bindings, names: set[str]) -> Bindings:
    if not names:
        return b
    return {x: v for x, v in b.items() if x not in names}


def _subst(e: Expr, b: Bindings) -> Expr:
    match e:
        case Var(name):
            return b.get(name, e)
        case IntLit() | BoolLit() | StrLit() | Unit() | Nil():
            return e
        case Fun(param, body):
            inner = _drop(b, pattern_vars(param))
            return e if not inner else Fun(param, _subst(body, inner))
        case App(fn, arg):
            return App(_subst(fn, b), _subst(arg, b))
        case BinOp(op, left, right):
            return BinOp(op, _subst(left, b), _subst(right, b))
        case UnOp(op, operand):
            return UnOp(op, _subst(operand, b))
        case If(cond, then_branch, else_branch):
            return If(_subst(cond, b), _subst(then_branch, b), _subst(else_branch, b))
        case Let(binding, bound, body):
            inner = _drop(b, pattern_vars(binding))
            new_body = body if not inner else _subst(body, inner)
            return Let(binding, _subst(bound, b), new_body)
        case LetRec(name, param, fbody, body):
            in_fbody = _drop(b, pattern_vars(param) | {name})
            in_body = _drop(b, {name})
            new_fbody = fbody if not in_fbody else _subst(fbody, in_fbody)
            new_body = body if not in_body else _subst(body, in_body)
            return LetRec(name, param, new_fbody, new_body)
        case Cons(head, tail):
            return Cons(_subst(head, b), _subst(tail, b))
        case Tuple(items):
            return Tuple(tuple(_subst(item, b) for item in items))
        case Match(scrutinee, clauses):
            return Match(_subst(scrutinee, b), _subst_clauses(clauses, b))
        case Try(tryee, clauses):
            return Try(_subst(tryee, b), _subst_clauses(clauses, b))
        case Raise(payload):
            return Raise(_subst(payload, b))
        case Seq(first, second):
            return Seq(_subst(first, b), _subst(second, b))
        case RecClosure(name, param, fbody):
            inner = _drop(b, pattern_vars(param) | {name})
            return e if not inner else RecClosure(name, param, _subst(fbody, inner))
        case _:
            # GlobalRef and anything without variable occurrences
            return e


def _subst_clauses(clauses, b: Bindings):
    out = []
    for pat, rhs in clauses:
        inner = _drop(b, pattern_vars(pat))
        out.append((pat, rhs if not inner else _subst(rhs, inner)))
    return tuple(out)


def match_pattern(p: Pattern, v: Expr) -> Bindings | None:
    """First-order matching of value `v` against `p`.

    Returns the bindings on success and None on mismatch.  Kind
    disagreements (e.g. an int pattern against a list) are mismatches,
    not errors; the engine turns them into `Match_failure`.
    """
    match p, v:
        case PVar(name), _:
            return {name: v}
        case PWild(), _:
            return {}
        case PInt(n), IntLit(m) if n == m:
            return {}
        case PBool(a), BoolLit(c) if a == c:
            return {}
        case PStr(s), StrLit(t) if s == t:
            return {}
        case PUnit(), Unit():
            return {}
        case PNil(), Nil():
            return {}
        case PCons(ph, pt), Cons(vh, vt):
            left = match_pattern(ph, vh)
            if left is None:
                return None
            right = match_pattern(pt, vt)
            if right is None:
                return None
            left.update(right)
            return left
        case PTuple(pats), Tuple(vals) if len(pats) == len(vals):
            out: Bindings = {}
            for pat, val in zip(pats, vals):
                one = match_pattern(pat, val)
                if one is None:
                    return None
                out.update(one)
            return out
        case _:
            return None

"""Hypothesis strategies over the object-language AST.

The expression strategy may produce free variables and ill-typed terms;
that is fine for the printer/parser and substitution properties it
feeds, which never evaluate.
"""

from __future__ import annotations

from hypothesis import strategies as st

from ministep.ast import (
    App,
    BinOp,
    BoolLit,
    Cons,
    Fun,
    If,
    IntLit,
    Let,
    LetRec,
    Match,
    Nil,
    PCons,
    PInt,
    PTuple,
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
    OPERATORS,
)

NAMES = ("x", "y", "z", "f", "g", "acc")

names = st.sampled_from(NAMES)

patterns = st.one_of(
    names.map(PVar),
    st.just(PWild()),
    st.integers(-5, 5).map(PInt),
    st.just(PCons(PVar("h"), PVar("t"))),
    st.just(PTuple((PVar("a"), PVar("b")))),
)

_texts = st.text(alphabet="ab\\\"\n\té", max_size=4)

leaves = st.one_of(
    st.integers(-99, 99).map(IntLit),
    st.booleans().map(BoolLit),
    _texts.map(StrLit),
    st.just(Unit()),
    st.just(Nil()),
    names.map(Var),
)


def _compound(sub):
    clauses = st.lists(st.tuples(patterns, sub), min_size=1, max_size=3).map(tuple)
    return st.one_of(
        st.tuples(names, sub).map(lambda t: Fun(PVar(t[0]), t[1])),
        st.tuples(sub, sub).map(lambda t: App(*t)),
        st.tuples(st.sampled_from(sorted(OPERATORS)), sub, sub).map(lambda t: BinOp(*t)),
        sub.map(lambda e: UnOp("-", e)),
        st.tuples(sub, sub, sub).map(lambda t: If(*t)),
        st.tuples(patterns, sub, sub).map(lambda t: Let(*t)),
        # a let rec whose body is exactly the bound name denotes the
        # closure value and is produced as RecClosure by the parser
        st.tuples(names, names, sub, sub)
        .filter(lambda t: t[3] != Var(t[0]))
        .map(lambda t: LetRec(t[0], PVar(t[1]), t[2], t[3])),
        st.tuples(sub, sub).map(lambda t: Cons(*t)),
        st.lists(sub, min_size=2, max_size=3).map(lambda xs: Tuple(tuple(xs))),
        st.tuples(sub, clauses).map(lambda t: Match(*t)),
        st.tuples(sub, clauses).map(lambda t: Try(*t)),
        sub.map(Raise),
        st.tuples(sub, sub).map(lambda t: Seq(*t)),
        st.tuples(names, names, sub).map(lambda t: RecClosure(t[0], PVar(t[1]), t[2])),
    )


exprs = st.recursive(leaves, _compound, max_leaves=25)

import pytest
from hypothesis import given, strategies as st

from ministep.ast import (
    BinOp,
    BoolLit,
    Cons,
    Fun,
    IntLit,
    Nil,
    PCons,
    PInt,
    PTuple,
    PVar,
    Tuple,
    Var,
    free_vars,
    is_value,
)
from ministep.parser import parse_expr
from ministep.subst import match_pattern, subst, subst_many

from strategies import exprs

values = st.one_of(
    st.integers(-99, 99).map(IntLit),
    st.booleans().map(BoolLit),
    st.just(Nil()),
    st.just(Cons(IntLit(1), Nil())),
    st.just(parse_expr("fun q -> q + 1", allow_free=True)),
)


def test_subst_var():
    assert subst(Var("x"), "x", IntLit(4)) == IntLit(4)


def test_subst_shadowing():
    e = Fun(PVar("x"), Var("x"))
    assert subst(e, "x", IntLit(4)) == e


def test_subst_function_body():
    # f x = (x * 2) - 1 applied to 4
    body = parse_expr("(x * 2) - 1", allow_free=True)
    assert subst(body, "x", IntLit(4)) == parse_expr("(4 * 2) - 1")


def test_subst_requires_closed_value():
    with pytest.raises(AssertionError):
        subst(Var("x"), "x", Var("y"))
    with pytest.raises(AssertionError):
        subst(Var("x"), "x", parse_expr("1 + 2"))


def test_subst_many_simultaneous():
    e = BinOp("+", Var("a"), Var("b"))
    assert subst_many(e, {"a": IntLit(1), "b": IntLit(2)}) == parse_expr("1 + 2")


def test_subst_many_empty_is_identity():
    e = parse_expr("fun x -> x + y", allow_free=True)
    assert subst_many(e, {}) is e


def test_subst_many_cons_bindings():
    # bindings as produced by `match [1; 2] with h :: t -> h :: t`
    b = match_pattern(PCons(PVar("h"), PVar("t")), parse_expr("[1; 2]"))
    assert b == {"h": IntLit(1), "t": Cons(IntLit(2), Nil())}
    e = parse_expr("h :: t", allow_free=True)
    assert subst_many(e, b) == parse_expr("1 :: [2]")


def test_match_pattern_var():
    assert match_pattern(PVar("x"), IntLit(4)) == {"x": IntLit(4)}


def test_match_pattern_cons_vs_nil():
    assert match_pattern(PCons(PVar("h"), PVar("t")), Nil()) is None


def test_match_pattern_tuple():
    got = match_pattern(PTuple((PInt(1), PVar("y"))), Tuple((IntLit(1), BoolLit(True))))
    assert got == {"y": BoolLit(True)}
    assert match_pattern(PTuple((PInt(2), PVar("y"))), Tuple((IntLit(1), BoolLit(True)))) is None


def test_match_pattern_arity_mismatch():
    assert match_pattern(PTuple((PVar("a"), PVar("b"))), parse_expr("(1, 2, 3)")) is None


@given(exprs, st.sampled_from(("x", "y", "f")), values)
def test_subst_untouched_without_free_occurrence(e, x, v):
    if x not in free_vars(e):
        assert subst(e, x, v) == e


@given(exprs, st.sampled_from(("x", "y", "f")), values)
def test_subst_removes_free_variable(e, x, v):
    assert free_vars(subst(e, x, v)) == free_vars(e) - {x}


@given(values)
def test_values_stay_values_under_subst(v):
    e = parse_expr("x :: [y]", allow_free=True)
    out = subst_many(e, {"x": v, "y": v})
    assert is_value(out)

import pytest

from ministep.ast import (
    App,
    BinOp,
    BoolLit,
    Cons,
    Define,
    DefineRec,
    Fun,
    GlobalRef,
    IntLit,
    Let,
    Nil,
    PCons,
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
)
from ministep.parser import ParseError, UnboundVariableError, parse_expr, parse_program


def test_arithmetic_tree():
    got = parse_expr("(1 + 2 * 3) + 4")
    want = BinOp("+", BinOp("+", IntLit(1), BinOp("*", IntLit(2), IntLit(3))), IntLit(4))
    assert got == want


def test_try_tree():
    got = parse_expr("try (2 + 3 * (raise 4) + 5) with x -> x")
    tryee = BinOp(
        "+",
        BinOp("+", IntLit(2), BinOp("*", IntLit(3), Raise(IntLit(4)))),
        IntLit(5),
    )
    assert got == Try(tryee, ((PVar("x"), Var("x")),))


def test_left_associated_chain():
    got = parse_expr("2 + 3 + (raise 4) + 5")
    want = BinOp(
        "+",
        BinOp("+", BinOp("+", IntLit(2), IntLit(3)), Raise(IntLit(4))),
        IntLit(5),
    )
    assert got == want


def test_unbound_at_top_level():
    with pytest.raises(UnboundVariableError):
        parse_program("x")


def test_fun():
    assert parse_expr("fun x -> x") == Fun(PVar("x"), Var("x"))


def test_list_literal_desugars():
    assert parse_expr("[1; 2]") == Cons(IntLit(1), Cons(IntLit(2), Nil()))
    assert parse_expr("1 :: [2]") == parse_expr("[1; 2]")
    assert parse_expr("[]") == Nil()


def test_cons_right_associative():
    assert parse_expr("1 :: 2 :: []") == Cons(IntLit(1), Cons(IntLit(2), Nil()))


def test_application_left_associative_tighter_than_ops():
    got = parse_expr("f 1 2 + g 3", allow_free=True)
    want = BinOp(
        "+",
        App(App(Var("f"), IntLit(1)), IntLit(2)),
        App(Var("g"), IntLit(3)),
    )
    assert got == want


def test_precedence_tower():
    assert parse_expr("1 + 2 * 3 = 7 && true || false") == BinOp(
        "||",
        BinOp(
            "&&",
            BinOp("=", BinOp("+", IntLit(1), BinOp("*", IntLit(2), IntLit(3))), IntLit(7)),
            BoolLit(True),
        ),
        BoolLit(False),
    )


def test_unary_minus_folds_literals_only():
    assert parse_expr("-5") == IntLit(-5)
    assert parse_expr("- 5") == IntLit(-5)
    assert parse_expr("-(5)") == UnOp("-", IntLit(5))
    assert parse_expr("-x", allow_free=True) == UnOp("-", Var("x"))
    assert parse_expr("1 - -2") == BinOp("-", IntLit(1), IntLit(-2))


def test_sequence_groups_right():
    got = parse_expr("a; b; c", allow_free=True)
    assert got == Seq(Var("a"), Seq(Var("b"), Var("c")))


def test_tuples_and_unit():
    assert parse_expr("()") == Unit()
    assert parse_expr("(1, true)") == Tuple((IntLit(1), BoolLit(True)))
    assert parse_expr("((1))") == IntLit(1)


def test_string_escapes():
    assert parse_expr(r'"a\n\t\"\\ \065"') == StrLit('a\n\t"\\ A')


def test_nested_comments_skipped():
    assert parse_expr("1 (* outer (* inner *) still *) + 2") == parse_expr("1 + 2")


def test_top_level_definitions():
    p = parse_program("let f x = x + 1 ;; let rec g n = g (n - 1) ;; f (g 0)")
    assert p.defs[0] == Define("f", Fun(PVar("x"), BinOp("+", Var("x"), IntLit(1))))
    assert isinstance(p.defs[1], DefineRec)
    # recursive occurrences refer to the definition itself
    assert p.defs[1].fbody == App(GlobalRef("g"), BinOp("-", Var("n"), IntLit(1)))
    assert p.main == (App(GlobalRef("f"), App(GlobalRef("g"), IntLit(0))),)


def test_top_level_let_in_is_main_expression():
    p = parse_program("let x = 1 in x + 1")
    assert p.defs == ()
    assert p.main == (Let(PVar("x"), IntLit(1), BinOp("+", Var("x"), IntLit(1))),)


def test_separator_optional_between_defs():
    p = parse_program("let a = 1\nlet b = 2 ;; a + b")
    assert [d.name for d in p.defs] == ["a", "b"]


def test_rec_closure_special_form():
    e = parse_expr("let rec f x = f x in f")
    assert e == RecClosure("f", PVar("x"), App(Var("f"), Var("x")))


def test_let_function_sugar():
    assert parse_expr("let f x y = x in f", allow_free=True) == Let(
        PVar("f"), Fun(PVar("x"), Fun(PVar("y"), Var("x"))), Var("f")
    )


def test_pattern_forms():
    e = parse_expr("match l with [] -> 0 | _ :: (a, b) :: t -> a", allow_free=True)
    pats = [p for p, _ in e.clauses]
    assert pats[1] == PCons(PWild(), PCons(PTuple((PVar("a"), PVar("b"))), PVar("t")))


def test_pattern_linearity_enforced():
    with pytest.raises(ParseError):
        parse_expr("match p with (a, a) -> a", allow_free=True)


def test_let_rec_requires_parameter():
    with pytest.raises(ParseError):
        parse_program("let rec x = 1 ;; x")


def test_duplicate_definition_rejected():
    with pytest.raises(ParseError):
        parse_program("let x = 1 ;; let x = 2 ;; x")


def test_malformed_inputs_raise_parse_error():
    for src in ["let", "1 +", "(1", "match x with", "fun -> 1", "[1; ]", '"open', "1 ;; )"]:
        with pytest.raises(ParseError):
            parse_program(src)


def test_error_spans_point_at_the_problem():
    try:
        parse_program("let f x = x ;;\n  mystery 4")
    except UnboundVariableError as ex:
        assert ex.name == "mystery"
        assert ex.span.line == 2
        assert ex.span.column == 3
    else:
        pytest.fail("expected UnboundVariableError")


def test_builtins_resolve_as_globals():
    assert parse_expr("print_string") == GlobalRef("print_string")
    assert parse_expr("print_int") == GlobalRef("print_int")


def test_locals_shadow_globals():
    p = parse_program("let x = 1 ;; let x' = fun x -> x + x ;; x' x")
    assert p.defs[1].expr == Fun(PVar("x"), BinOp("+", Var("x"), Var("x")))
    assert p.main == (App(GlobalRef("x'"), GlobalRef("x")),)

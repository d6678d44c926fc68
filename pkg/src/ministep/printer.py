"""Canonical concrete-syntax rendering with redex/reduct annotation.

The printer emits a single line of pure ASCII with minimal parentheses,
so byte offsets equal character offsets and identical trees print to
identical text.  An annotation addresses one subterm by its path of
child indices from the root; the returned span covers that subterm's
full printed extent, including any parentheses emitted for it, which
makes textual splicing of a reduct into a pre-step program sound.

Child numbering (shared with context.hole_path): App fn=0 arg=1;
BinOp left=0 right=1; UnOp/Raise 0; If cond=0 then=1 else=2;
Let bound=0 body=1; LetRec fbody=0 body=1; Fun body=0; Cons head=0
tail=1; Tuple item i=i; Match/Try scrutinee=0, clause i rhs=1+i;
Seq first=0 second=1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    App,
    BinOp,
    BoolLit,
    Clause,
    Cons,
    Define,
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
    PBool,
    PCons,
    PInt,
    PNil,
    Program,
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
)

# Precedence levels, loosest to tightest.  A node is parenthesized when
# its own level is below what its position requires.
SEQ, OPEN, OR, AND, CMP, CONS, ADD, MUL, UNARY, APP, ATOM = range(1, 12)

BINOP_PREC = {
    "||": OR,
    "&&": AND,
    "=": CMP,
    "<>": CMP,
    "<": CMP,
    "<=": CMP,
    ">": CMP,
    ">=": CMP,
    "+": ADD,
    "-": ADD,
    "^": ADD,
    "*": MUL,
    "/": MUL,
}

REDEX = "redex"
REDUCT = "reduct"

Path = tuple[int, ...]


@dataclass(frozen=True)
class Annotation:
    """Marks one subterm, addressed by its child-index path from the root."""

    kind: str  # REDEX or REDUCT
    path: Path


@dataclass(frozen=True)
class Span:
    """Character extent [start, end) within a printed line (ASCII, so
    byte offsets coincide)."""

    start: int
    end: int


def escape_string(s: str) -> str:
    """OCaml-style string escaping; non-ASCII goes out as decimal byte
    escapes so printed programs stay pure ASCII."""
    out = []
    for b in s.encode("utf-8", "surrogateescape"):
        ch = chr(b)
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\b":
            out.append("\\b")
        elif 32 <= b < 127:
            out.append(ch)
        else:
            out.append("\\%03d" % b)
    return "".join(out)


def _digit_leading(e: Expr) -> bool:
    # Would the unparenthesized rendering of `e` start with a digit?
    # Only a leading non-negative literal can, possibly at the head of an
    # application chain (negative heads get precedence parens anyway).
    while isinstance(e, App):
        e = e.fn
    return isinstance(e, IntLit) and e.value >= 0


def _hungry(e: Expr) -> bool:
    # True when the unparenthesized right edge of `e` would swallow a
    # following `| pat -> ...` clause of an enclosing match/try.
    match e:
        case Match() | Try():
            return True
        case Fun(_, body) | Let(_, _, body) | LetRec(_, _, _, body) | Seq(_, body):
            return _hungry(body)
        case If(_, _, else_branch):
            return _hungry(else_branch)
        case _:
            return False


def _seq_hungry(e: Expr) -> bool:
    # True when the unparenthesized right edge of `e` ends in a
    # sequence-level position, so a following `; ...` would be parsed
    # into `e` instead of as a separator.
    match e:
        case Fun() | Let() | LetRec() | RecClosure() | Match() | Try():
            return True
        case If(_, _, else_branch):
            return _seq_hungry(else_branch)
        case _:
            return False


class _Printer:
    def __init__(self) -> None:
        self.parts: list[str] = []
        self.pos = 0
        self.span: Span | None = None

    def write(self, s: str) -> None:
        self.parts.append(s)
        self.pos += len(s)

    def text(self) -> str:
        return "".join(self.parts)

    @staticmethod
    def _child(path: Path | None, idx: int) -> Path | None:
        if path and path[0] == idx:
            return path[1:]
        return None

    def expr(self, e: Expr, ctx: int, path: Path | None, force_parens: bool = False) -> None:
        at_target = path == ()
        cp = None if at_target else path
        prec = self._prec(e, cp)
        parens = force_parens or prec < ctx
        if at_target:
            start = self.pos
        if parens:
            self.write("(")
        self._emit(e, cp)
        if parens:
            self.write(")")
        if at_target:
            self.span = Span(start, self.pos)

    def _prec(self, e: Expr, cp: Path | None) -> int:
        match e:
            case IntLit(n):
                return UNARY if n < 0 else ATOM
            case BoolLit() | StrLit() | Unit() | Var() | GlobalRef() | Nil() | Tuple():
                return ATOM
            case Fun() | If() | Let() | LetRec() | Match() | Try() | RecClosure():
                return OPEN
            case App():
                return APP
            case Raise():
                # binds like a unary prefix: bare as an operand
                # (`3 + raise 4`), parenthesized when applied
                return UNARY
            case UnOp():
                return UNARY
            case BinOp(op, _, _):
                return BINOP_PREC[op]
            case Cons():
                return ATOM if self._cons_flat(e, cp) else CONS
            case Seq():
                return SEQ
            case _:
                raise AssertionError(f"unknown expression {e!r}")

    @staticmethod
    def _cons_flat(e: Expr, path: Path | None) -> bool:
        # A cons spine prints as a [..] literal when it ends in Nil and the
        # annotation does not address a spine tail (whose extent would not
        # be contiguous in the flattened form).
        node, p = e, path
        while isinstance(node, Cons):
            if p == ():
                return False
            p = p[1:] if (p and p[0] == 1) else None
            node = node.tail
        return isinstance(node, Nil) and p is None

    def _emit(self, e: Expr, cp: Path | None) -> None:
        match e:
            case IntLit(n):
                self.write(str(n))
            case BoolLit(b):
                self.write("true" if b else "false")
            case StrLit(s):
                self.write('"' + escape_string(s) + '"')
            case Unit():
                self.write("()")
            case Var(name) | GlobalRef(name):
                self.write(name)
            case Fun():
                self._emit_fun(e, cp)
            case App(fn, arg):
                self.expr(fn, APP, self._child(cp, 0))
                self.write(" ")
                self.expr(arg, ATOM, self._child(cp, 1))
            case BinOp(op, left, right):
                prec = BINOP_PREC[op]
                self.expr(left, prec, self._child(cp, 0))
                self.write(f" {op} ")
                self.expr(right, prec + 1, self._child(cp, 1))
            case UnOp(op, operand):
                self.write(op)
                # parenthesize digit-leading operands so `-(3)` and
                # `-(3 x)` do not re-lex as a negative literal
                self.expr(operand, UNARY, self._child(cp, 0), force_parens=_digit_leading(operand))
            case If(cond, then_branch, else_branch):
                self.write("if ")
                self.expr(cond, SEQ, self._child(cp, 0))
                self.write(" then ")
                self.expr(then_branch, OPEN, self._child(cp, 1))
                self.write(" else ")
                self.expr(else_branch, OPEN, self._child(cp, 2))
            case Let(binding, bound, body):
                self.write(f"let {print_pattern(binding)} = ")
                self.expr(bound, SEQ, self._child(cp, 0))
                self.write(" in ")
                self.expr(body, SEQ, self._child(cp, 1))
            case LetRec(name, param, fbody, body):
                self.write(f"let rec {name} {_pattern_atom(param)} = ")
                self.expr(fbody, SEQ, self._child(cp, 0))
                self.write(" in ")
                self.expr(body, SEQ, self._child(cp, 1))
            case RecClosure(name, param, fbody):
                self.write(f"let rec {name} {_pattern_atom(param)} = ")
                self.expr(fbody, SEQ, self._child(cp, 0))
                self.write(f" in {name}")
            case Nil():
                self.write("[]")
            case Cons():
                self._emit_cons(e, cp)
            case Tuple(items):
                self.write("(")
                for i, item in enumerate(items):
                    if i:
                        self.write(", ")
                    self.expr(item, SEQ, self._child(cp, i))
                self.write(")")
            case Match(scrutinee, clauses):
                self.write("match ")
                self.expr(scrutinee, SEQ, self._child(cp, 0))
                self.write(" with ")
                self._emit_clauses(clauses, cp)
            case Try(tryee, clauses):
                self.write("try ")
                self.expr(tryee, SEQ, self._child(cp, 0))
                self.write(" with ")
                self._emit_clauses(clauses, cp)
            case Raise(payload):
                self.write("raise ")
                self.expr(payload, ATOM, self._child(cp, 0))
            case Seq(first, second):
                self.expr(first, OPEN, self._child(cp, 0), force_parens=_seq_hungry(first))
                self.write("; ")
                self.expr(second, SEQ, self._child(cp, 1))
            case _:
                raise AssertionError(f"unknown expression {e!r}")

    def _emit_fun(self, e: Fun, cp: Path | None) -> None:
        # `fun x -> fun y -> e` prints curried as `fun x y -> e`; the sugar
        # is only safe while no annotation addresses an intermediate node.
        self.write("fun ")
        params = [_pattern_atom(e.param)]
        body: Expr = e.body
        while cp is None and isinstance(body, Fun):
            params.append(_pattern_atom(body.param))
            body = body.body
        self.write(" ".join(params))
        self.write(" -> ")
        self.expr(body, SEQ, self._child(cp, 0))

    def _emit_cons(self, e: Cons, cp: Path | None) -> None:
        elems: list[tuple[Expr, Path | None]] = []
        node: Expr = e
        p = cp
        while isinstance(node, Cons):
            if p == ():
                break
            ep = self._child(p, 0) if p else None
            np = self._child(p, 1) if p else None
            elems.append((node.head, ep))
            node = node.tail
            p = np
        if isinstance(node, Nil) and p is None:
            self.write("[")
            for i, (elem, ep) in enumerate(elems):
                if i:
                    self.write("; ")
                non_final = i != len(elems) - 1
                self.expr(elem, OPEN, ep, force_parens=non_final and _seq_hungry(elem))
            self.write("]")
        else:
            for elem, ep in elems:
                self.expr(elem, ADD, ep)  # left of `::` binds tighter
                self.write(" :: ")
            self.expr(node, CONS, p)

    def _emit_clauses(self, clauses: tuple[Clause, ...], cp: Path | None) -> None:
        last = len(clauses) - 1
        for i, (pat, rhs) in enumerate(clauses):
            if i:
                self.write(" | ")
            self.write(print_pattern(pat))
            self.write(" -> ")
            force = i != last and _hungry(rhs)
            self.expr(rhs, SEQ, self._child(cp, 1 + i), force_parens=force)


def print_expr(e: Expr, ann: Annotation | None = None) -> tuple[str, Span | None]:
    """Render `e`; when `ann` is given, also return the span of the
    annotated subterm within the returned text."""
    pr = _Printer()
    pr.expr(e, SEQ, ann.path if ann else None)
    return pr.text(), pr.span


def print_annotated_ocaml(e: Expr, ann: Annotation | None = None) -> str:
    """Render with the annotated subterm marked inline as
    `(<subterm>)[@stepper.redex]` (or .reduct)."""
    text, span = print_expr(e, ann)
    if ann is None or span is None:
        return text
    return annotate_text(text, span, ann.kind)


def annotate_text(text: str, span: Span, kind: str) -> str:
    return f"{text[:span.start]}({text[span.start:span.end]})[@stepper.{kind}]{text[span.end:]}"


def _pattern_prec(p: Pattern) -> int:
    match p:
        case PInt(n):
            return UNARY if n < 0 else ATOM
        case PCons():
            return ATOM if _pcons_flat(p) else CONS
        case _:
            return ATOM


def _pcons_flat(p: Pattern) -> bool:
    node = p
    while isinstance(node, PCons):
        node = node.tail
    return isinstance(node, PNil)


def print_pattern(p: Pattern, ctx: int = SEQ) -> str:
    text = _pattern_text(p)
    if _pattern_prec(p) < ctx:
        return f"({text})"
    return text


def _pattern_text(p: Pattern) -> str:
    match p:
        case PVar(name):
            return name
        case PWild():
            return "_"
        case PInt(n):
            return str(n)
        case PBool(b):
            return "true" if b else "false"
        case PStr(s):
            return '"' + escape_string(s) + '"'
        case PUnit():
            return "()"
        case PNil():
            return "[]"
        case PCons():
            if _pcons_flat(p):
                elems = []
                node = p
                while isinstance(node, PCons):
                    elems.append(print_pattern(node.head, OPEN))
                    node = node.tail
                return "[" + "; ".join(elems) + "]"
            return f"{print_pattern(p.head, ADD)} :: {print_pattern(p.tail, CONS)}"
        case PTuple(items):
            return "(" + ", ".join(print_pattern(item, SEQ) for item in items) + ")"
        case _:
            raise AssertionError(f"unknown pattern {p!r}")


def _pattern_atom(p: Pattern) -> str:
    return print_pattern(p, ATOM)


def print_def(d: Define | DefineRec) -> str:
    if isinstance(d, Define):
        return f"let {d.name} = {print_expr(d.expr)[0]}"
    return f"let rec {d.name} {_pattern_atom(d.param)} = {print_expr(d.fbody)[0]}"


def print_program(p: Program) -> str:
    lines = [print_def(d) for d in p.defs]
    lines.extend(print_expr(e)[0] for e in p.main)
    return " ;;\n".join(lines) + ("\n" if lines else "")

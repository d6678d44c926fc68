"""Lexer and recursive-descent parser for the OCaml subset.

Grammar (loosest binding first):

    program   ::= item (";;"? item)* ";;"?
    item      ::= "let" ["rec"] name pat_atom* "=" seq      (top-level def)
                | seq                                        (main expression)
    seq       ::= open (";" seq)?
    open      ::= "if" seq "then" open "else" open
                | "fun" pat_atom+ "->" seq
                | "match" seq "with" clauses
                | "try" seq "with" clauses
                | "let" ["rec"] ... "in" seq
                | or
    clauses   ::= "|"? pattern "->" seq ("|" pattern "->" seq)*
    or        ::= and ("||" and)*                     (left)
    and       ::= cmp ("&&" cmp)*                     (left)
    cmp       ::= cons (("="|"<>"|"<"|"<="|">"|">=") cons)*   (left)
    cons      ::= add ("::" cons)?                    (right)
    add       ::= mul (("+"|"-"|"^") mul)*            (left)
    mul       ::= unary (("*"|"/") unary)*            (left)
    unary     ::= "-" unary | app                     (folds integer literals)
    app       ::= "raise" atom | atom atom*           (left)
    atom      ::= int | string | "true" | "false" | ident
                | "(" ")" | "(" seq ("," seq)* ")" | "[" (open (";" open)*)? "]"

Names are resolved during parsing: locally bound names stay `Var`,
references to earlier top-level definitions (or the printing builtins)
become `GlobalRef`, and anything else is reported as unbound — parsed
programs are closed by construction.  `let rec f x = e in f` with the
body being exactly the bound name denotes the recursive-closure value
the engine prints, and parses back to it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    App,
    BinOp,
    BoolLit,
    BUILTIN_GLOBALS,
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
    TopDef,
    Try,
    Tuple,
    Unit,
    UnOp,
    Var,
    pattern_vars,
)
from .subst import subst


@dataclass(frozen=True)
class SourceSpan:
    start_offset: int
    end_offset: int
    line: int
    column: int


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span.line}:{span.column}: {message}")
        self.message = message
        self.span = span


class UnboundVariableError(ParseError):
    def __init__(self, name: str, span: SourceSpan):
        super().__init__(f"unbound variable: {name}", span)
        self.name = name


KEYWORDS = frozenset(
    {"let", "rec", "in", "fun", "if", "then", "else", "match", "try", "with", "raise", "true", "false"}
)

# longest first so maximal munch works
_SYMBOLS = (
    ";;",
    "::",
    "->",
    "<=",
    ">=",
    "<>",
    "&&",
    "||",
    "=",
    "<",
    ">",
    "+",
    "-",
    "*",
    "/",
    "^",
    ";",
    ",",
    "|",
    "(",
    ")",
    "[",
    "]",
)


@dataclass(frozen=True)
class Token:
    kind: str  # "int" | "string" | "ident" | keyword | symbol | "eof"
    text: str
    span: SourceSpan
    value: object = None


def _is_ident_start(ch: str) -> bool:
    return ch.isascii() and (ch.isalpha() or ch == "_")


def _is_ident_char(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch in "_'")


def tokenize(src: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(src)

    def span_from(start: int, start_line: int, start_col: int) -> SourceSpan:
        return SourceSpan(start, i, start_line, start_col)

    def err(message: str, start: int, start_line: int, start_col: int) -> ParseError:
        return ParseError(message, span_from(start, start_line, start_col))

    def advance(k: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and src[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = src[i]
        start, start_line, start_col = i, line, col
        if ch in " \t\r\n":
            advance()
            continue
        if src.startswith("(*", i):
            depth = 1
            advance(2)
            while depth and i < n:
                if src.startswith("(*", i):
                    depth += 1
                    advance(2)
                elif src.startswith("*)", i):
                    depth -= 1
                    advance(2)
                else:
                    advance()
            if depth:
                raise err("unterminated comment", start, start_line, start_col)
            continue
        if ch.isdigit():
            while i < n and src[i].isdigit():
                advance()
            text = src[start:i]
            tokens.append(Token("int", text, span_from(start, start_line, start_col), int(text)))
            continue
        if ch == '"':
            advance()
            buf = bytearray()
            while i < n and src[i] != '"':
                c = src[i]
                if c == "\\":
                    advance()
                    if i >= n:
                        break
                    esc = src[i]
                    if esc == "n":
                        buf.append(10)
                    elif esc == "t":
                        buf.append(9)
                    elif esc == "r":
                        buf.append(13)
                    elif esc == "b":
                        buf.append(8)
                    elif esc in ('"', "\\", "'"):
                        buf.append(ord(esc))
                    elif esc.isdigit():
                        if i + 2 >= n or not (src[i + 1].isdigit() and src[i + 2].isdigit()):
                            raise err("bad numeric escape", start, start_line, start_col)
                        code = int(src[i : i + 3])
                        if code > 255:
                            raise err("numeric escape out of range", start, start_line, start_col)
                        buf.append(code)
                        advance(2)
                    else:
                        raise err(f"unknown escape '\\{esc}'", start, start_line, start_col)
                    advance()
                else:
                    buf.extend(c.encode("utf-8", "surrogateescape"))
                    advance()
            if i >= n:
                raise err("unterminated string literal", start, start_line, start_col)
            advance()  # closing quote
            value = bytes(buf).decode("utf-8", "surrogateescape")
            tokens.append(Token("string", src[start:i], span_from(start, start_line, start_col), value))
            continue
        if _is_ident_start(ch):
            while i < n and _is_ident_char(src[i]):
                advance()
            text = src[start:i]
            kind = text if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, span_from(start, start_line, start_col)))
            continue
        for sym in _SYMBOLS:
            if src.startswith(sym, i):
                advance(len(sym))
                tokens.append(Token(sym, sym, span_from(start, start_line, start_col)))
                break
        else:
            raise err(f"unexpected character {ch!r}", start, start_line, start_col)
    tokens.append(Token("eof", "", SourceSpan(n, n, line, col)))
    return tokens


_ATOM_STARTS = frozenset({"int", "string", "ident", "true", "false", "(", "["})


class _Parser:
    def __init__(self, src: str, globals: tuple[str, ...] = (), allow_free: bool = False):
        self.tokens = tokenize(src)
        self.i = 0
        self.scopes: list[set[str]] = []
        self.globals: set[str] = set(globals)
        self.allow_free = allow_free

    # -- token helpers --------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def eat(self, kind: str) -> bool:
        if self.at(kind):
            self.i += 1
            return True
        return False

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise ParseError(f"expected '{kind}', found '{found}'", tok.span)
        return self.next()

    def fail(self, message: str) -> ParseError:
        return ParseError(message, self.peek().span)

    # -- scopes ----------------------------------------------------------

    def _lookup(self, name: str, span: SourceSpan) -> Expr:
        for scope in reversed(self.scopes):
            if name in scope:
                return Var(name)
        if name in self.globals or name in BUILTIN_GLOBALS:
            return GlobalRef(name)
        if self.allow_free:
            return Var(name)
        raise UnboundVariableError(name, span)

    # -- program ---------------------------------------------------------

    def program(self) -> Program:
        defs: list[TopDef] = []
        main: list[Expr] = []
        while self.eat(";;"):
            pass
        while not self.at("eof"):
            if self.at("let"):
                item = self._let(toplevel=True)
                if isinstance(item, (Define, DefineRec)):
                    defs.append(item)
                else:
                    main.append(item)
            else:
                main.append(self.seq())
            if not self.at("eof"):
                while self.eat(";;"):
                    pass
        return Program(tuple(defs), tuple(main))

    def expression(self) -> Expr:
        e = self.seq()
        self.expect("eof")
        return e

    # -- expressions -----------------------------------------------------

    def seq(self) -> Expr:
        e = self.open()
        if self.eat(";"):
            return Seq(e, self.seq())
        return e

    def open(self) -> Expr:
        tok = self.peek()
        if tok.kind == "if":
            self.next()
            cond = self.seq()
            self.expect("then")
            then_branch = self.open()
            self.expect("else")
            else_branch = self.open()
            return If(cond, then_branch, else_branch)
        if tok.kind == "fun":
            self.next()
            params = [self.pattern_atom()]
            while not self.at("->"):
                params.append(self.pattern_atom())
            self.expect("->")
            bound = set()
            for p in params:
                bound |= pattern_vars(p)
            self.scopes.append(bound)
            try:
                body = self.seq()
            finally:
                self.scopes.pop()
            return _curry(params, body)
        if tok.kind == "match":
            self.next()
            scrutinee = self.seq()
            self.expect("with")
            return Match(scrutinee, self.clauses())
        if tok.kind == "try":
            self.next()
            tryee = self.seq()
            self.expect("with")
            return Try(tryee, self.clauses())
        if tok.kind == "let":
            e = self._let(toplevel=False)
            assert isinstance(e, Expr)
            return e
        return self.or_expr()

    def _let(self, toplevel: bool) -> Expr | TopDef:
        let_tok = self.expect("let")
        rec = self.eat("rec")
        if rec:
            name_tok = self.expect("ident")
            name = name_tok.text
            if self.at("="):
                raise ParseError("'let rec' requires at least one parameter", self.peek().span)
            params = [self.pattern_atom()]
            while not self.at("="):
                params.append(self.pattern_atom())
            self.expect("=")
            bound = {name}
            for p in params:
                bound |= pattern_vars(p)
            self.scopes.append(bound)
            try:
                rhs = self.seq()
            finally:
                self.scopes.pop()
            fbody = _curry(params[1:], rhs)
            if self.eat("in"):
                self.scopes.append({name})
                try:
                    body = self.seq()
                finally:
                    self.scopes.pop()
                if body == Var(name):
                    return RecClosure(name, params[0], fbody)
                return LetRec(name, params[0], fbody, body)
            if not toplevel:
                raise ParseError("expected 'in'", self.peek().span)
            self._register_def(name, name_tok.span)
            # at top level the recursive occurrences refer to the definition
            return DefineRec(name, params[0], subst(fbody, name, GlobalRef(name)))

        binding = self.pattern()
        params = []
        if isinstance(binding, PVar):
            while not self.at("="):
                params.append(self.pattern_atom())
        self.expect("=")
        bound = set()
        for p in params:
            bound |= pattern_vars(p)
        self.scopes.append(bound)
        try:
            rhs = self.seq()
        finally:
            self.scopes.pop()
        rhs = _curry(params, rhs)
        if self.eat("in"):
            self.scopes.append(pattern_vars(binding))
            try:
                body = self.seq()
            finally:
                self.scopes.pop()
            return Let(binding, rhs, body)
        if not toplevel:
            raise ParseError("expected 'in'", self.peek().span)
        if not isinstance(binding, PVar):
            raise ParseError("a top-level let must bind a plain name", let_tok.span)
        self._register_def(binding.name, let_tok.span)
        return Define(binding.name, rhs)

    def _register_def(self, name: str, span: SourceSpan) -> None:
        if name in self.globals:
            raise ParseError(f"duplicate top-level definition of '{name}'", span)
        self.globals.add(name)

    def clauses(self) -> tuple[tuple[Pattern, Expr], ...]:
        self.eat("|")  # optional leading bar
        out = []
        while True:
            p = self.pattern()
            self.expect("->")
            self.scopes.append(pattern_vars(p))
            try:
                rhs = self.seq()
            finally:
                self.scopes.pop()
            out.append((p, rhs))
            if not self.eat("|"):
                break
        return tuple(out)

    def or_expr(self) -> Expr:
        e = self.and_expr()
        while self.at("||"):
            self.next()
            e = BinOp("||", e, self.and_expr())
        return e

    def and_expr(self) -> Expr:
        e = self.cmp_expr()
        while self.at("&&"):
            self.next()
            e = BinOp("&&", e, self.cmp_expr())
        return e

    def cmp_expr(self) -> Expr:
        e = self.cons_expr()
        while self.peek().kind in ("=", "<>", "<", "<=", ">", ">="):
            op = self.next().kind
            e = BinOp(op, e, self.cons_expr())
        return e

    def cons_expr(self) -> Expr:
        e = self.add_expr()
        if self.eat("::"):
            return Cons(e, self.cons_expr())
        return e

    def add_expr(self) -> Expr:
        e = self.mul_expr()
        while self.peek().kind in ("+", "-", "^"):
            op = self.next().kind
            e = BinOp(op, e, self.mul_expr())
        return e

    def mul_expr(self) -> Expr:
        e = self.unary_expr()
        while self.peek().kind in ("*", "/"):
            op = self.next().kind
            e = BinOp(op, e, self.unary_expr())
        return e

    def unary_expr(self) -> Expr:
        if self.at("-"):
            self.next()
            if self.at("int"):  # a negative literal, not an application of minus
                tok = self.next()
                return IntLit(-tok.value)
            return UnOp("-", self.unary_expr())
        return self.app_expr()

    def app_expr(self) -> Expr:
        if self.at("raise"):
            self.next()
            return Raise(self.atom())
        e = self.atom()
        while self.peek().kind in _ATOM_STARTS:
            e = App(e, self.atom())
        return e

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return IntLit(tok.value)
        if tok.kind == "string":
            self.next()
            return StrLit(tok.value)
        if tok.kind == "true":
            self.next()
            return BoolLit(True)
        if tok.kind == "false":
            self.next()
            return BoolLit(False)
        if tok.kind == "ident":
            self.next()
            return self._lookup(tok.text, tok.span)
        if tok.kind == "(":
            self.next()
            if self.eat(")"):
                return Unit()
            items = [self.seq()]
            while self.eat(","):
                items.append(self.seq())
            self.expect(")")
            if len(items) == 1:
                return items[0]
            return Tuple(tuple(items))
        if tok.kind == "[":
            self.next()
            if self.eat("]"):
                return Nil()
            items = [self.open()]
            while self.eat(";"):
                items.append(self.open())
            self.expect("]")
            e: Expr = Nil()
            for item in reversed(items):
                e = Cons(item, e)
            return e
        found = tok.text or "end of input"
        raise ParseError(f"expected an expression, found '{found}'", tok.span)

    # -- patterns ----------------------------------------------------------

    def pattern(self) -> Pattern:
        p = self._pattern_cons()
        _check_linear(p, self.peek().span)
        return p

    def _pattern_cons(self) -> Pattern:
        p = self.pattern_atom(check=False)
        if self.eat("::"):
            return PCons(p, self._pattern_cons())
        return p

    def pattern_atom(self, check: bool = True) -> Pattern:
        tok = self.peek()
        p: Pattern
        if tok.kind == "int":
            self.next()
            p = PInt(tok.value)
        elif tok.kind == "-":
            self.next()
            num = self.expect("int")
            p = PInt(-num.value)
        elif tok.kind == "string":
            self.next()
            p = PStr(tok.value)
        elif tok.kind == "true":
            self.next()
            p = PBool(True)
        elif tok.kind == "false":
            self.next()
            p = PBool(False)
        elif tok.kind == "ident":
            self.next()
            p = PWild() if tok.text == "_" else PVar(tok.text)
        elif tok.kind == "(":
            self.next()
            if self.eat(")"):
                p = PUnit()
            else:
                items = [self._pattern_cons()]
                while self.eat(","):
                    items.append(self._pattern_cons())
                self.expect(")")
                p = items[0] if len(items) == 1 else PTuple(tuple(items))
        elif tok.kind == "[":
            self.next()
            if self.eat("]"):
                p = PNil()
            else:
                items = [self._pattern_cons()]
                while self.eat(";"):
                    items.append(self._pattern_cons())
                self.expect("]")
                p = PNil()
                for item in reversed(items):
                    p = PCons(item, p)
        else:
            found = tok.text or "end of input"
            raise ParseError(f"expected a pattern, found '{found}'", tok.span)
        if check:
            _check_linear(p, tok.span)
        return p


def _curry(params: list[Pattern], body: Expr) -> Expr:
    for p in reversed(params):
        body = Fun(p, body)
    return body


def _check_linear(p: Pattern, span: SourceSpan) -> None:
    seen: set[str] = set()

    def walk(q: Pattern) -> None:
        match q:
            case PVar(name):
                if name in seen:
                    raise ParseError(f"pattern binds '{name}' twice", span)
                seen.add(name)
            case PCons(head, tail):
                walk(head)
                walk(tail)
            case PTuple(items):
                for item in items:
                    walk(item)
            case _:
                pass

    walk(p)


def parse_program(src: str) -> Program:
    """Parse a source file into top-level definitions and main expressions."""
    return _Parser(src).program()


def parse_expr(src: str, globals: tuple[str, ...] = (), allow_free: bool = False) -> Expr:
    """Parse a single expression.

    `globals` names resolve to GlobalRef; with `allow_free`, unbound
    names stay Var instead of failing (used when re-parsing printed
    subterms).
    """
    return _Parser(src, globals=tuple(globals), allow_free=allow_free).expression()

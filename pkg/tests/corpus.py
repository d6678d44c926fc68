"""Shared program corpus: fixed programs covering every reduction rule,
plus a seeded type-directed generator for random closed programs.

Generated programs use bounded recursion (helpers called with small
literal arguments) so both evaluators terminate quickly; division by
zero and raises are allowed since exceptional outcomes are comparable
too.
"""

from __future__ import annotations

import random

FIXED: list[tuple[str, str]] = [
    ("arith_nested", "(1 + 2 * 3) + 4"),
    ("uncaught_chain", "2 + 3 + (raise 4) + 5"),
    ("uncaught_sub", "3 + (raise 4) - 5"),
    ("try_discard_handle", "try (2 + 3 * (raise 4) + 5) with x -> x"),
    ("try_handler_body", "2 * (try 3 + (raise 4) - 5 with x -> x + 6)"),
    (
        "try_nested",
        "0 + (try 1 + 2 * (try (3 + raise 4) - 5 with x -> x + 6) with y -> y)",
    ),
    ("skip_demo", "let f x = (x * 2) - 1 ;; f 4 + 10 * 100"),
    ("fac", "let rec fac n = if n = 0 then 1 else n * fac (n - 1) ;; fac 4"),
    ("beta", "(fun x -> x + 1) 41"),
    ("let_simple", "let x = 1 + 2 in x * x"),
    ("letrec_local", "let rec dbl x = if x = 0 then 0 else 2 + dbl (x - 1) in dbl 3"),
    ("match_cons", "match [1; 2] with h :: t -> h :: t | [] -> []"),
    ("match_tuple", "match (1, true) with (1, y) -> y | _ -> false"),
    ("match_failure", "match [] with h :: t -> h"),
    ("match_failure_caught", "try (match [] with h :: t -> h) with m -> 0"),
    ("seq_prints", 'print_string "a"; print_string "b"'),
    ("print_arg", "print_int (1 + 1)"),
    ("print_order", '(print_string "L"; fun x -> x) (print_string "R"; 1)'),
    ("div_zero", "1 / 0"),
    ("div_zero_caught", "try 1 / 0 with e -> 0"),
    ("try_value", "try 10 / 2 with e -> 0"),
    ("strings", '"foo" ^ "bar"'),
    ("if_true", 'if 1 < 2 then "y" else "n"'),
    ("if_false", "if 2 <= 1 then 1 else 0"),
    ("bool_ops", "(true && false, false || true)"),
    ("tuple_eval", '(1, 2 + 3, "s")'),
    ("list_eval", "[1 + 1; 2 * 2; 0]"),
    ("let_pattern", "let (a, b) = (1, 2) in a + b"),
    (
        "map_hof",
        "let rec map f l = match l with [] -> [] | h :: t -> f h :: map f t ;;"
        " map (fun x -> x * 2) [1; 2; 3]",
    ),
    (
        "length",
        "let rec len l = match l with [] -> 0 | h :: t -> 1 + len t ;; len [1; 2; 3]",
    ),
    ("sum", "let rec sum n = if n = 0 then 0 else n + sum (n - 1) ;; sum 5"),
    ("global_value", "let x = 5 ;; x + x"),
    ("global_computed", "let c = 2 + 3 ;; c * c"),
    ("reraise", "try (try raise 7 with 0 -> 1) with y -> y"),
    ("reraise_discard", "try (1 + (try raise 9 with 0 -> 0)) with x -> x + 1"),
    ("unary", "- (1 + 2)"),
    ("nested_apply", "let id = fun y -> y in id (id 5)"),
    ("hof_beta", "(fun f -> f 1) (fun x -> x + 10)"),
    ("string_eq", '"abc" = "abc"'),
    ("tuple_eq", "(1, 2) = (1, 3)"),
    ("swap", "let swap p = match p with (a, b) -> (b, a) ;; swap (1, 2)"),
    (
        "append",
        "let rec app l1 l2 = match l1 with [] -> l2 | h :: t -> h :: app t l2 ;;"
        " app [1; 2] [3]",
    ),
    ("value_main", "fun x -> x"),
    ("raise_payload", "raise (1 + 1)"),
    ("hello", 'print_string "hello"'),
    ("raise_in_fun", "(fun x -> raise x) 1"),
    ("raise_in_fun_caught", "try (fun x -> raise x) 1 with e -> e"),
    ("if_guards_div", "if true then 1 else 1 / 0"),
    ("fib", "let rec fib n = if n < 2 then n else fib (n - 1) + fib (n - 2) ;; fib 5"),
    ("unit_compare", "() = ()"),
    ("cmp_strings", '"a" < "ab"'),
    ("letrec_value", "let rec f x = x in f"),
    ("closure_apply", "(let rec f x = if x = 0 then [] else 1 :: f (x - 1) in f) 2"),
    ("multi_main", "let inc n = n + 1 ;; inc 1 ;; inc 41"),
    ("shadow", "let x = 1 in let x = x + 1 in x * 10"),
]

_PREAMBLE = (
    "let rec sum n = if n <= 0 then 0 else n + sum (n - 1) ;;\n"
    "let rec len l = match l with [] -> 0 | h :: t -> 1 + len t ;;\n"
    "let dbl x = x * 2 ;;\n"
)

_INT_RANGE = (-9, 9)
_WORDS = ["a", "b", "zig", "zag", ""]


class _Gen:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.depth = 6
        self.names = 0

    def fresh(self) -> str:
        self.names += 1
        return f"v{self.names}"

    def pick(self, options):
        return self.rng.choice(options)

    def gen(self, ty: str, depth: int, env: dict[str, str]) -> str:
        """Return source text of a closed expression of shape `ty`."""
        rng = self.rng
        if depth <= 0 or rng.random() < 0.2:
            return self.leaf(ty, env)
        if rng.random() < 0.04:
            payload = self.gen("int", 0, env)
            return f"(try raise ({payload}) with e -> {self.leaf(ty, env)})"
        builders = {
            "int": self.gen_int,
            "bool": self.gen_bool,
            "str": self.gen_str,
            "unit": self.gen_unit,
            "intlist": self.gen_intlist,
            "pair": self.gen_pair,
        }
        return builders[ty](depth - 1, env)

    def leaf(self, ty: str, env: dict[str, str]) -> str:
        rng = self.rng
        vars_of_ty = [n for n, t in env.items() if t == ty]
        if vars_of_ty and rng.random() < 0.5:
            return rng.choice(vars_of_ty)
        if ty == "int":
            return str(rng.randint(*_INT_RANGE))
        if ty == "bool":
            return rng.choice(["true", "false"])
        if ty == "str":
            return '"%s"' % rng.choice(_WORDS)
        if ty == "unit":
            return "()"
        if ty == "intlist":
            items = [str(rng.randint(*_INT_RANGE)) for _ in range(rng.randint(0, 3))]
            return "[" + "; ".join(items) + "]"
        if ty == "pair":
            return f"({rng.randint(*_INT_RANGE)}, {rng.randint(*_INT_RANGE)})"
        raise AssertionError(ty)

    def _binders(self, ty: str, depth: int, env: dict[str, str]) -> str:
        rng = self.rng
        kind = rng.randrange(3)
        if kind == 0:  # let
            x = self.fresh()
            vty = self.pick(["int", "bool", "intlist", "pair", "str"])
            bound = self.gen(vty, depth - 1, env)
            body = self.gen(ty, depth - 1, {**env, x: vty})
            return f"(let {x} = {bound} in {body})"
        if kind == 1:  # beta redex
            x = self.fresh()
            vty = self.pick(["int", "bool", "str"])
            arg = self.gen(vty, depth - 1, env)
            body = self.gen(ty, depth - 1, {**env, x: vty})
            return f"((fun {x} -> {body}) ({arg}))"
        x = self.fresh()  # match on a pair
        y = self.fresh()
        scrut = self.gen("pair", depth - 1, env)
        body = self.gen(ty, depth - 1, {**env, x: "int", y: "int"})
        return f"(match {scrut} with ({x}, {y}) -> {body})"

    def gen_int(self, depth: int, env: dict[str, str]) -> str:
        rng = self.rng
        k = rng.randrange(10)
        if k < 3:
            op = self.pick(["+", "-", "*"])
            return f"({self.gen('int', depth, env)} {op} {self.gen('int', depth, env)})"
        if k == 3:
            return f"({self.gen('int', depth, env)} / {self.gen('int', depth, env)})"
        if k == 4:
            return (
                f"(if {self.gen('bool', depth, env)} then {self.gen('int', depth, env)}"
                f" else {self.gen('int', depth, env)})"
            )
        if k == 5:
            return self._binders("int", depth, env)
        if k == 6:
            return f"(sum {self.rng.randint(0, 5)})"
        if k == 7:
            return f"(len {self.gen('intlist', depth, env)})"
        if k == 8:
            return f"(dbl {self.gen('int', depth, env)})"
        return (
            f"(match {self.gen('intlist', depth, env)} with"
            f" [] -> {self.gen('int', depth, env)} | h :: t -> h)"
        )

    def gen_bool(self, depth: int, env: dict[str, str]) -> str:
        k = self.rng.randrange(6)
        if k < 2:
            op = self.pick(["=", "<>", "<", "<=", ">", ">="])
            return f"({self.gen('int', depth, env)} {op} {self.gen('int', depth, env)})"
        if k == 2:
            op = self.pick(["&&", "||"])
            return f"({self.gen('bool', depth, env)} {op} {self.gen('bool', depth, env)})"
        if k == 3:
            return (
                f"(if {self.gen('bool', depth, env)} then {self.gen('bool', depth, env)}"
                f" else {self.gen('bool', depth, env)})"
            )
        if k == 4:
            return f"({self.gen('str', depth, env)} = {self.gen('str', depth, env)})"
        return self._binders("bool", depth, env)

    def gen_str(self, depth: int, env: dict[str, str]) -> str:
        k = self.rng.randrange(4)
        if k < 2:
            return f"({self.gen('str', depth, env)} ^ {self.gen('str', depth, env)})"
        if k == 2:
            return (
                f"(if {self.gen('bool', depth, env)} then {self.gen('str', depth, env)}"
                f" else {self.gen('str', depth, env)})"
            )
        return self._binders("str", depth, env)

    def gen_unit(self, depth: int, env: dict[str, str]) -> str:
        k = self.rng.randrange(4)
        if k == 0:
            return f"(print_string {self.gen('str', depth, env)})"
        if k == 1:
            return f"(print_int {self.gen('int', depth, env)})"
        if k == 2:
            return f"({self.gen('unit', depth, env)}; {self.gen('unit', depth, env)})"
        return self._binders("unit", depth, env)

    def gen_intlist(self, depth: int, env: dict[str, str]) -> str:
        k = self.rng.randrange(4)
        if k == 0:
            return f"({self.gen('int', depth, env)} :: {self.gen('intlist', depth, env)})"
        if k == 1:
            return (
                f"(if {self.gen('bool', depth, env)} then {self.gen('intlist', depth, env)}"
                f" else {self.gen('intlist', depth, env)})"
            )
        if k == 2:
            return (
                f"(match {self.gen('intlist', depth, env)} with"
                f" [] -> {self.gen('intlist', depth, env)} | h :: t -> t)"
            )
        return self._binders("intlist", depth, env)

    def gen_pair(self, depth: int, env: dict[str, str]) -> str:
        k = self.rng.randrange(3)
        if k == 0:
            return f"({self.gen('int', depth, env)}, {self.gen('int', depth, env)})"
        if k == 1:
            return (
                f"(if {self.gen('bool', depth, env)} then {self.gen('pair', depth, env)}"
                f" else {self.gen('pair', depth, env)})"
            )
        return self._binders("pair", depth, env)


def generate_random_sources(n: int, seed: int = 20240817) -> list[str]:
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        g = _Gen(rng)
        ty = rng.choice(["int", "bool", "str", "unit", "intlist", "pair"])
        body = g.gen(ty, rng.randint(2, 6), {})
        # occasionally leave the main expression able to raise uncaught
        if rng.random() < 0.1:
            body = f"{body} + (raise {rng.randint(0, 9)})" if ty == "int" else body
        out.append(_PREAMBLE + body + "\n")
    return out


def all_sources() -> list[tuple[str, str]]:
    fixed = list(FIXED)
    fixed.extend(
        (f"random_{i:03d}", src) for i, src in enumerate(generate_random_sources(200))
    )
    return fixed

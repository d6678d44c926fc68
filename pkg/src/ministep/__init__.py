"""ministep: a substitution-based algebraic stepper for a mini-ML.

Parse a program, step-evaluate it while reconstructing the whole
program at every reduction via two-level evaluation contexts, and
serialize the resulting trace for the viewer.
"""

from .ast import Expr, Pattern, Program, free_vars, is_value
from .engine import (
    EngineState,
    RunResult,
    Stuck,
    StepLimitExceeded,
    UncaughtException,
    Value,
    reference_eval,
    run_program,
    run_source,
    step_eval,
)
from .parser import ParseError, SourceSpan, UnboundVariableError, parse_expr, parse_program
from .printer import Annotation, print_annotated_ocaml, print_expr, print_pattern
from .subst import match_pattern, subst, subst_many
from .trace import Step, Trace, ValidationReport, emit_json, emit_text, load_json, validate

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "EngineState",
    "Expr",
    "ParseError",
    "Pattern",
    "Program",
    "RunResult",
    "SourceSpan",
    "Step",
    "StepLimitExceeded",
    "Stuck",
    "Trace",
    "UnboundVariableError",
    "UncaughtException",
    "ValidationReport",
    "Value",
    "emit_json",
    "emit_text",
    "free_vars",
    "is_value",
    "load_json",
    "match_pattern",
    "parse_expr",
    "parse_program",
    "print_annotated_ocaml",
    "print_expr",
    "print_pattern",
    "reference_eval",
    "run_program",
    "run_source",
    "step_eval",
    "subst",
    "subst_many",
    "validate",
    "__version__",
]

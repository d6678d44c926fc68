"""Reduction traces: model, text/JSON serialization, and validation.

A trace interleaves two kinds of events: steps (one reduction each,
recorded as the whole program before and after with redex/reduct spans)
and application markers that delimit skippable regions.  Region start
and end index into that interleaved event sequence.  `segments` gives
the first step index of each top-level expression, so chain checks do
not cross expression boundaries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

RULE_TAGS = frozenset(
    {
        "Beta",
        "GlobalApply",
        "Delta",
        "IfTrue",
        "IfFalse",
        "Let",
        "LetRec",
        "Match",
        "Seq",
        "TryValue",
        "TryHandle",
        "RaiseDiscard",
        "Reraise",
        "Print",
    }
)

RESULT_KINDS = ("value", "exception", "stuck", "limit")

Span = tuple[int, int]


@dataclass(frozen=True)
class Step:
    n: int
    pre_text: str
    pre_span: Span
    post_text: str
    post_span: Span
    rule: str
    output: str = ""


@dataclass(frozen=True)
class Region:
    app_id: int
    start: int  # position of the start marker in the event sequence
    end: int  # position of the end marker


@dataclass(frozen=True)
class Trace:
    source: str
    steps: tuple[Step, ...]
    regions: tuple[Region, ...]
    segments: tuple[int, ...]
    result_kind: str
    result_text: str


class TraceBuilder:
    """Event sink for the engine; accumulates steps and markers in
    emission order."""

    def __init__(self) -> None:
        self._events: list[tuple[str, object]] = []
        self._segments: list[int] = []

    def on_step(self, step: Step) -> None:
        self._events.append(("step", step))

    def on_apply_start(self, app_id: int) -> None:
        self._events.append(("start", app_id))

    def on_apply_end(self, app_id: int) -> None:
        self._events.append(("end", app_id))

    def mark_segment(self, step_index: int) -> None:
        self._segments.append(step_index)

    def last_post_text(self) -> str:
        for kind, payload in reversed(self._events):
            if kind == "step":
                return payload.post_text
        return ""

    def finish(self, source: str, result_kind: str, result_text: str) -> Trace:
        steps = []
        regions = []
        stack: list[tuple[int, int]] = []
        for pos, (kind, payload) in enumerate(self._events):
            if kind == "step":
                steps.append(payload)
            elif kind == "start":
                stack.append((payload, pos))
            else:
                app_id, start = stack.pop()
                assert app_id == payload, "application markers out of order"
                regions.append(Region(app_id, start, pos))
        assert not stack, "unclosed application region"
        regions.sort(key=lambda r: r.start)
        return Trace(
            source=source,
            steps=tuple(steps),
            regions=tuple(regions),
            segments=tuple(self._segments),
            result_kind=result_kind,
            result_text=result_text,
        )


def events(t: Trace) -> list[tuple[str, object]]:
    """Rebuild the interleaved event sequence from steps and regions.

    Raises ValueError when region positions are inconsistent.
    """
    total = len(t.steps) + 2 * len(t.regions)
    slots: list[tuple[str, object] | None] = [None] * total
    for r in t.regions:
        for pos, kind in ((r.start, "start"), (r.end, "end")):
            if not 0 <= pos < total:
                raise ValueError(f"region {r.app_id}: marker position {pos} out of range")
            if slots[pos] is not None:
                raise ValueError(f"region {r.app_id}: marker position {pos} already taken")
            slots[pos] = (kind, r.app_id)
    it = iter(t.steps)
    for pos in range(total):
        if slots[pos] is None:
            try:
                slots[pos] = ("step", next(it))
            except StopIteration:
                raise ValueError("region marker positions leave gaps") from None
    return slots  # type: ignore[return-value]


def _annotate(text: str, span: Span, kind: str) -> str:
    a, b = span
    return f"{text[:a]}({text[a:b]})[@stepper.{kind}]{text[b:]}"


def emit_text(t: Trace) -> str:
    """Comment-marker text rendering: a pre and a post line per step plus
    application marker lines, in emission order."""
    lines = []
    for kind, payload in events(t):
        if kind == "step":
            s = payload
            lines.append(f"(* Step {s.n} *) {_annotate(s.pre_text, s.pre_span, 'redex')}")
            lines.append(f"(* Step {s.n + 1} *) {_annotate(s.post_text, s.post_span, 'reduct')}")
        elif kind == "start":
            lines.append(f"(* Application {payload} start *)")
        else:
            lines.append(f"(* Application {payload} end *)")
    return "\n".join(lines) + ("\n" if lines else "")


def emit_json(t: Trace) -> bytes:
    doc = {
        "source": t.source,
        "result": {"kind": t.result_kind, "text": t.result_text},
        "steps": [
            {
                "n": s.n,
                "pre": {"text": s.pre_text, "span": list(s.pre_span)},
                "post": {"text": s.post_text, "span": list(s.post_span)},
                "rule": s.rule,
                "output": s.output,
            }
            for s in t.steps
        ],
        "regions": [{"id": r.app_id, "start": r.start, "end": r.end} for r in t.regions],
        "segments": list(t.segments),
    }
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


def load_json(data: bytes | str) -> Trace:
    """Inverse of emit_json; raises ValueError on malformed input."""
    try:
        doc = json.loads(data)
        steps = tuple(
            Step(
                n=s["n"],
                pre_text=s["pre"]["text"],
                pre_span=(s["pre"]["span"][0], s["pre"]["span"][1]),
                post_text=s["post"]["text"],
                post_span=(s["post"]["span"][0], s["post"]["span"][1]),
                rule=s["rule"],
                output=s["output"],
            )
            for s in doc["steps"]
        )
        regions = tuple(Region(r["id"], r["start"], r["end"]) for r in doc["regions"])
        return Trace(
            source=doc["source"],
            steps=steps,
            regions=regions,
            segments=tuple(doc.get("segments", ())),
            result_kind=doc["result"]["kind"],
            result_text=doc["result"]["text"],
        )
    except (json.JSONDecodeError, KeyError, IndexError, TypeError) as ex:
        raise ValueError(f"malformed trace: {ex}") from ex


@dataclass(frozen=True)
class Violation:
    kind: str
    step: int | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(
    t: Trace,
    parse_expr_fn: Callable | None = None,
    parse_program_fn: Callable | None = None,
) -> ValidationReport:
    """Independent trace checker.

    Verifies: consecutive step indices, marker balance and nesting,
    span fidelity (each span extracts a parseable subexpression),
    single-step rewrite soundness (splicing the reduct text into the
    pre-program at the redex span re-parses to the post-program), and
    chain consistency (post of step k tree-equals pre of step k+1
    within each segment).
    """
    from . import parser as _parser

    parse_expr_fn = parse_expr_fn or _parser.parse_expr
    parse_program_fn = parse_program_fn or _parser.parse_program

    bad: list[Violation] = []

    global_names: tuple[str, ...] = ()
    if t.source:
        try:
            prog = parse_program_fn(t.source)
            global_names = tuple(d.name for d in prog.defs)
        except Exception as ex:
            bad.append(Violation("Unparseable", None, f"source does not parse: {ex}"))

    def parse(text: str, where: str, step: int):
        try:
            return parse_expr_fn(text, globals=global_names, allow_free=True)
        except Exception as ex:
            bad.append(Violation("Unparseable", step, f"{where} does not parse: {ex}"))
            return None

    for k, s in enumerate(t.steps):
        if s.n != k:
            bad.append(Violation("NonconsecutiveIndex", k, f"step labeled {s.n} at position {k}"))
        if s.rule not in RULE_TAGS:
            bad.append(Violation("UnknownRule", k, f"unknown rule tag {s.rule!r}"))
        for which, text, span in (("pre", s.pre_text, s.pre_span), ("post", s.post_text, s.post_span)):
            a, b = span
            if not (0 <= a <= b <= len(text)):
                bad.append(Violation("SpanFidelity", k, f"{which} span {span} outside text"))
                continue
            if parse(text[a:b], f"{which} span substring", k) is None:
                bad.append(Violation("SpanFidelity", k, f"{which} span does not cover a subexpression"))

    # chain consistency within segments
    starts = set(t.segments)
    for k in range(len(t.steps) - 1):
        if k + 1 in starts:
            continue
        post = parse(t.steps[k].post_text, "post program", k)
        pre = parse(t.steps[k + 1].pre_text, "pre program", k + 1)
        if post is not None and pre is not None and post != pre:
            bad.append(
                Violation(
                    "ChainBreak",
                    k,
                    f"post of step {k} differs from pre of step {k + 1}",
                )
            )

    # rewrite soundness
    for k, s in enumerate(t.steps):
        a, b = s.pre_span
        c, d = s.post_span
        if not (0 <= a <= b <= len(s.pre_text) and 0 <= c <= d <= len(s.post_text)):
            continue
        spliced = s.pre_text[:a] + s.post_text[c:d] + s.pre_text[b:]
        got = parse(spliced, "spliced program", k)
        want = parse(s.post_text, "post program", k)
        if got is not None and want is not None and got != want:
            bad.append(
                Violation("RewriteUnsound", k, f"replacing the redex by the reduct gives {spliced!r}")
            )

    # marker balance and nesting
    try:
        seq = events(t)
    except ValueError as ex:
        bad.append(Violation("MarkerImbalance", None, str(ex)))
    else:
        stack: list[int] = []
        for kind, payload in seq:
            if kind == "start":
                stack.append(payload)
            elif kind == "end":
                if not stack or stack[-1] != payload:
                    bad.append(Violation("MarkerImbalance", None, f"end marker {payload} does not match"))
                    break
                stack.pop()
        if stack:
            bad.append(Violation("MarkerImbalance", None, f"unclosed regions {stack}"))

    for i, seg in enumerate(t.segments):
        if not 0 <= seg <= len(t.steps) or (i and seg < t.segments[i - 1]):
            bad.append(Violation("BadSegment", None, f"segment start {seg} out of order"))

    return ValidationReport(tuple(bad))

/**
 * Pure view-state model: cursor movement, region skipping, rendering.
 *
 * The cursor ranges over program states 0..steps.length: state c is the
 * program after c reductions.  State c (for c < steps.length) is shown
 * as the before/after pair of step c.  Collapsing a region with steps
 * first..last hides the intermediate states first+1..last, which is
 * exactly the jump the skip button performs: from the application's
 * "before" view to the view right after its body finished.
 */

import { parseTrace, regionSteps, StepRange, TraceData } from "./trace.js";

export interface ViewState {
    trace: TraceData;
    ranges: StepRange[];
    cursor: number;
    collapsed: Set<number>;
    showPane: "both" | "pre" | "post";
}

export interface PaneModel {
    label: string;
    text: string;
    span: [number, number] | null;
    highlight: "redex" | "reduct" | null;
}

export interface RegionCrumb {
    id: number;
    first: number;
    last: number;
    collapsed: boolean;
}

export interface ViewModel {
    empty: boolean;
    cursor: number;
    lastState: number;
    rule: string | null;
    panes: PaneModel[];
    output: string;
    breadcrumbs: RegionCrumb[];
    visible: number[];
    result: { kind: string; text: string };
    showPane: "both" | "pre" | "post";
}

export function loadTrace(raw: string): ViewState {
    const trace = parseTrace(raw);
    return {
        trace,
        ranges: regionSteps(trace),
        cursor: 0,
        collapsed: new Set(),
        showPane: "both",
    };
}

function lastState(state: ViewState): number {
    return state.trace.steps.length;
}

function hiddenBy(state: ViewState, c: number): StepRange | undefined {
    // a state is hidden when it lies strictly inside a collapsed region
    return state.ranges.find(
        (r) => state.collapsed.has(r.id) && c > r.first && c <= r.last
    );
}

export function visibleStates(state: ViewState): number[] {
    const out: number[] = [];
    for (let c = 0; c <= lastState(state); c++) {
        if (!hiddenBy(state, c)) out.push(c);
    }
    return out;
}

function settle(state: ViewState, c: number, direction: 1 | -1): number {
    let r = hiddenBy(state, c);
    while (r) {
        c = direction === 1 ? r.last + 1 : r.first;
        r = hiddenBy(state, c);
    }
    return Math.max(0, Math.min(lastState(state), c));
}

export function next(state: ViewState): ViewState {
    const target = Math.min(lastState(state), state.cursor + 1);
    return { ...state, cursor: settle(state, target, 1) };
}

export function prev(state: ViewState): ViewState {
    const target = Math.max(0, state.cursor - 1);
    return { ...state, cursor: settle(state, target, -1) };
}

/** Collapse a region; lands on the state right after its body finished. */
export function skip(state: ViewState, id: number): ViewState {
    const r = state.ranges.find((x) => x.id === id);
    if (!r) return state;
    if (state.cursor < r.first || state.cursor > r.last) return state;
    const collapsed = new Set(state.collapsed);
    collapsed.add(id);
    return { ...state, collapsed, cursor: r.last + 1 };
}

export function unskip(state: ViewState, id: number): ViewState {
    if (!state.collapsed.has(id)) return state;
    const collapsed = new Set(state.collapsed);
    collapsed.delete(id);
    return { ...state, collapsed };
}

export function togglePane(state: ViewState): ViewState {
    const order: ViewState["showPane"][] = ["both", "pre", "post"];
    const showPane = order[(order.indexOf(state.showPane) + 1) % order.length];
    return { ...state, showPane };
}

/** Pure rendering: everything the DOM layer (or a test) needs to show
 *  one state. */
export function render(state: ViewState): ViewModel {
    const { trace, cursor } = state;
    const last = lastState(state);
    const step = cursor < last ? trace.steps[cursor] : null;
    const panes: PaneModel[] = [];
    if (step) {
        panes.push({
            label: `Step ${step.n}`,
            text: step.pre.text,
            span: step.pre.span,
            highlight: "redex",
        });
        panes.push({
            label: `Step ${step.n + 1}`,
            text: step.post.text,
            span: step.post.span,
            highlight: "reduct",
        });
    } else if (last > 0) {
        panes.push({
            label: `Step ${last} (final)`,
            text: trace.steps[last - 1].post.text,
            span: trace.steps[last - 1].post.span,
            highlight: "reduct",
        });
    }
    let output = "";
    for (let k = 0; k < cursor; k++) {
        output += trace.steps[k].output;
    }
    const breadcrumbs = state.ranges
        .filter((r) => cursor >= r.first && cursor <= r.last + 1)
        .sort((a, b) => a.first - b.first || b.last - a.last)
        .map((r) => ({
            id: r.id,
            first: r.first,
            last: r.last,
            collapsed: state.collapsed.has(r.id),
        }));
    return {
        empty: trace.steps.length === 0,
        cursor,
        lastState: last,
        rule: step ? step.rule : null,
        panes,
        output,
        breadcrumbs,
        visible: visibleStates(state),
        result: trace.result,
        showPane: state.showPane,
    };
}
